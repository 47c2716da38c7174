//! Non-rigorous reference zero finder used to cross-check certified reports.
//!
//! Dense seeding plus damped Newton polishing plus clustering, all in plain
//! floating point — deliberately a different numerical pathway from the
//! certifier, sharing none of its interval code, so agreement between the two
//! is meaningful. The harness certifies nothing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::certifier::{Outcome, ZeroReport};
use crate::interval::Rat;

/// One polished zero.
#[derive(Clone, Debug)]
pub struct ReferenceZero {
    /// Location as exact rationals (dyadic conversion of the polished f64s).
    pub location: Vec<Rat>,
    /// Max-norm residual of `f` at the polished point.
    pub residual: f64,
    /// Jacobian determinant estimate at the polished point.
    pub det_estimate: f64,
}

/// Reference zero set for one test function.
#[derive(Clone, Debug, Default)]
pub struct ReferenceZeros {
    pub zeros: Vec<ReferenceZero>,
}

const RESIDUAL_TOL: f64 = 1e-12;
const CLUSTER_RADIUS: f64 = 1e-6;

/// Find all zeros of `f` on `[-1,1]^d` by brute force: seed a dense grid,
/// polish each seed with damped Newton, keep converged interior points, and
/// cluster duplicates. Suite functions are chosen so this finds every zero.
pub fn brute_force_zeros(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    jac: &dyn Fn(&[f64]) -> Vec<Vec<f64>>,
    dim: usize,
    samples_per_axis: usize,
    newton_iters: usize,
) -> ReferenceZeros {
    let mut found: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let seed: Vec<f64> = idx
            .iter()
            .map(|&i| -1.0 + 2.0 * (i as f64 + 0.5) / samples_per_axis as f64)
            .collect();
        if let Some((z, res, det)) = newton_polish(f, jac, &seed, newton_iters) {
            let interior = z.iter().all(|&c| c.abs() <= 1.0 + 1e-9);
            let duplicate = found
                .iter()
                .any(|(w, _, _)| inf_dist(w, &z) < CLUSTER_RADIUS);
            if interior && !duplicate {
                found.push((z, res, det));
            }
        }
        // advance the seed lattice
        let mut axis = dim;
        loop {
            if axis == 0 {
                found.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite coordinates"));
                return ReferenceZeros {
                    zeros: found
                        .into_iter()
                        .map(|(z, residual, det_estimate)| ReferenceZero {
                            location: z.iter().map(|&c| f64_to_rat(c)).collect(),
                            residual,
                            det_estimate,
                        })
                        .collect(),
                };
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < samples_per_axis {
                break;
            }
            idx[axis] = 0;
        }
    }
}

fn newton_polish(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    jac: &dyn Fn(&[f64]) -> Vec<Vec<f64>>,
    seed: &[f64],
    iters: usize,
) -> Option<(Vec<f64>, f64, f64)> {
    let mut x = seed.to_vec();
    for _ in 0..iters {
        let fx = f(&x);
        let res = inf_norm(&fx);
        if res < RESIDUAL_TOL {
            break;
        }
        let j = jac(&x);
        let step = solve(&j, &fx)?;
        // damping: halve until the residual does not blow up
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            if inf_norm(&f(&trial)) <= (1.0 - 0.25 * t) * res + 1e-15 {
                x = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return None;
        }
        if x.iter().any(|c| !c.is_finite() || c.abs() > 3.0) {
            return None;
        }
    }
    let fx = f(&x);
    let res = inf_norm(&fx);
    if res >= RESIDUAL_TOL {
        return None;
    }
    let det = det_f64(&jac(&x));
    Some((x, res, det))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &c| m.max(c.abs()))
}

fn inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (&x, &y)| m.max((x - y).abs()))
}

/// Gaussian elimination with partial pivoting; `None` on (near-)singularity.
fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut p = col;
        for r in col + 1..n {
            if m[r][col].abs() > m[p][col].abs() {
                p = r;
            }
        }
        if m[p][col].abs() < 1e-14 {
            return None;
        }
        m.swap(p, col);
        rhs.swap(p, col);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= factor * m[col][c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for c in row + 1..n {
            s -= m[row][c] * x[c];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

fn det_f64(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let mut p = col;
        for r in col + 1..n {
            if m[r][col].abs() > m[p][col].abs() {
                p = r;
            }
        }
        if m[p][col].abs() == 0.0 {
            return 0.0;
        }
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= factor * m[col][c];
            }
        }
    }
    det
}

/// Exact rational from an f64 (every finite f64 is a dyadic rational).
pub fn f64_to_rat(x: f64) -> Rat {
    assert!(x.is_finite());
    BigRational::from_float(x).expect("finite float")
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.numer().to_f64().unwrap_or_else(|| approx_big(r.numer()))
        / r.denom().to_f64().unwrap_or_else(|| approx_big(r.denom()))
}

fn approx_big(x: &BigInt) -> f64 {
    x.to_string().parse().unwrap_or(f64::INFINITY)
}

/// Why a certified report disagrees with the reference zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompareFailure {
    NotCertified,
    CountMismatch { reported: u64, reference: usize },
    EmptyRegion { region: usize },
    CrowdedRegion { region: usize, zeros: usize },
    MissedZero { zero: usize },
    HausdorffExceeded { region: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompareVerdict {
    Pass,
    Fail(CompareFailure),
}

/// Check a certified report against reference zeros: count equality, exactly
/// one reference zero per region, every reference zero covered, and the
/// Hausdorff bound `1/n` on region diameters around their zero. All
/// containment and distance checks are exact rational comparisons.
pub fn compare_reports(reference: &ReferenceZeros, report: &ZeroReport) -> CompareVerdict {
    if report.outcome != Outcome::Certified {
        return CompareVerdict::Fail(CompareFailure::NotCertified);
    }
    if report.count != reference.zeros.len() as u64 {
        return CompareVerdict::Fail(CompareFailure::CountMismatch {
            reported: report.count,
            reference: reference.zeros.len(),
        });
    }
    let inv_n = Rat::new(BigInt::from(1), BigInt::from(report.n));
    let mut covered = vec![false; reference.zeros.len()];
    for (ri, region) in report.regions.iter().enumerate() {
        let mut inside = Vec::new();
        for (zi, z) in reference.zeros.iter().enumerate() {
            let contained = region.boxes.iter().any(|b| b.contains_point(&z.location));
            if contained {
                inside.push(zi);
                covered[zi] = true;
            }
        }
        match inside.len() {
            0 => return CompareVerdict::Fail(CompareFailure::EmptyRegion { region: ri }),
            1 => {}
            k => return CompareVerdict::Fail(CompareFailure::CrowdedRegion { region: ri, zeros: k }),
        }
        // every point of the region must be within 1/n of the zero it contains
        let z = &reference.zeros[inside[0]].location;
        for b in &region.boxes {
            let center = b.center();
            let half = b.half_side();
            let mut worst = Rat::new(BigInt::from(0), BigInt::from(1));
            for (c, zc) in center.iter().zip(z) {
                let d = (c - zc).abs() + &half;
                if d > worst {
                    worst = d;
                }
            }
            if worst > inv_n {
                return CompareVerdict::Fail(CompareFailure::HausdorffExceeded { region: ri });
            }
        }
    }
    if let Some(zi) = covered.iter().position(|c| !c) {
        return CompareVerdict::Fail(CompareFailure::MissedZero { zero: zi });
    }
    CompareVerdict::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    #[test]
    fn brute_force_identity() {
        let f = |x: &[f64]| x.to_vec();
        let jac = |_: &[f64]| vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let zeros = brute_force_zeros(&f, &jac, 2, 50, 30);
        assert_eq!(zeros.zeros.len(), 1);
        assert!(zeros.zeros[0].residual < RESIDUAL_TOL);
        assert!((zeros.zeros[0].det_estimate - 1.0).abs() < 1e-9);
        for c in &zeros.zeros[0].location {
            assert!(c.abs() < rat(1, 1_000_000));
        }
    }

    #[test]
    fn brute_force_quadratic_roots() {
        let f = |x: &[f64]| vec![x[0] * x[0] - 0.25];
        let jac = |x: &[f64]| vec![vec![2.0 * x[0]]];
        let zeros = brute_force_zeros(&f, &jac, 1, 50, 40);
        assert_eq!(zeros.zeros.len(), 2);
        let locs: Vec<f64> = zeros.zeros.iter().map(|z| rat_to_f64(&z.location[0])).collect();
        assert!((locs[0] + 0.5).abs() < 1e-9);
        assert!((locs[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn brute_force_circle_line() {
        let f = |x: &[f64]| vec![x[0] * x[0] + x[1] * x[1] - 0.5, x[1] - x[0]];
        let jac = |x: &[f64]| vec![vec![2.0 * x[0], 2.0 * x[1]], vec![-1.0, 1.0]];
        let zeros = brute_force_zeros(&f, &jac, 2, 40, 40);
        assert_eq!(zeros.zeros.len(), 2);
        for z in &zeros.zeros {
            let x = rat_to_f64(&z.location[0]);
            let y = rat_to_f64(&z.location[1]);
            assert!((x.abs() - 0.5).abs() < 1e-9);
            assert!((y - x).abs() < 1e-9);
            assert!(z.det_estimate.abs() > 0.5);
        }
    }
}
