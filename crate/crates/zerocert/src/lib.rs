//! Rigorous zero certification for C1 vector fields on the unit cube.
//!
//! Given a function on `[-1,1]^d` presented through rational polynomial
//! approximants, and the promise that all of its zeros are interior with
//! invertible Jacobian, [`certifier::certify`] computes the exact number of
//! zeros together with small rational boxes each containing exactly one zero.
//! On inputs that break the promise the answer is `Inconclusive` — never a
//! wrong certificate.

pub mod bnb;
pub mod certifier;
pub mod cli;
pub mod grid;
pub mod harness;
pub mod interval;
pub mod oracle;
pub mod poly;
pub mod report;

pub use certifier::{certify, CertifierConfig, Outcome, ZeroReport};
pub use oracle::C1Name;
