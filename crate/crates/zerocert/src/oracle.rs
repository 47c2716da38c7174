//! Function access through polynomial approximant names.
//!
//! A `C1Name` presents a continuously differentiable `f` on the cube
//! `[-1,1]^d` purely through approximants: for each accuracy index `k` it
//! yields rational polynomials within `2^-k` of `f` in the norm that bounds
//! both the function and its Jacobian (sup norm of each, summed). Everything
//! downstream consumes only these approximants, so enclosures of `f(x)` and
//! `Df(x)` inherit soundness from the approximation promise.
//!
//! The promise is required to hold on an enlarged cube
//! `[-1-margin, 1+margin]^d`, which is what makes the modulus-of-continuity
//! radii below valid up to the margin.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::interval::{pow2, IntervalMatrix, IntervalVector, Rat, RationalInterval};
use crate::poly::MultiPoly;

/// Rational-coefficient polynomial approximant with its accuracy budget.
#[derive(Clone, Debug)]
pub struct PolyApproximant {
    pub k: u32,
    /// Exactly `2^-k`; both the sup error of the components and the sup error
    /// of the Jacobian rows are promised to stay below this on the enlarged cube.
    pub error: Rat,
    pub components: Vec<MultiPoly>,
}

/// Analytic wrappers available for name construction beyond raw polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinKind {
    Sin,
    Cos,
    Exp,
}

impl BuiltinKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sin" => Some(Self::Sin),
            "cos" => Some(Self::Cos),
            "exp" => Some(Self::Exp),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Exp => "exp",
        }
    }
}

/// One component of a named function.
#[derive(Clone, Debug)]
pub enum ComponentSpec {
    /// Exact polynomial; every approximant is the polynomial itself.
    Poly(MultiPoly),
    /// `scale * kind(arg(x)) + shift`, approximated by truncated Taylor
    /// expansions whose degree is chosen per `k` from a Lagrange remainder
    /// bound on the enlarged cube.
    Analytic {
        kind: BuiltinKind,
        arg: MultiPoly,
        scale: Rat,
        shift: Rat,
    },
}

impl ComponentSpec {
    fn dim(&self) -> usize {
        match self {
            ComponentSpec::Poly(p) => p.dim(),
            ComponentSpec::Analytic { arg, .. } => arg.dim(),
        }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("box leaves the function domain (enlarged cube)")]
    DomainViolation,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A function given by its approximant provider.
#[derive(Debug)]
pub struct C1Name {
    dim: usize,
    margin: Rat,
    components: Vec<ComponentSpec>,
    approximants: Mutex<HashMap<u32, Arc<PolyApproximant>>>,
    jacobians: Mutex<HashMap<u32, Arc<Vec<Vec<MultiPoly>>>>>,
}

impl C1Name {
    pub fn new(components: Vec<ComponentSpec>, margin: Rat) -> Self {
        assert!(!components.is_empty());
        assert!(margin.is_positive(), "domain margin must be positive");
        let dim = components[0].dim();
        assert_eq!(components.len(), dim, "component count must equal dimension");
        assert!(components.iter().all(|c| c.dim() == dim));
        Self {
            dim,
            margin,
            components,
            approximants: Mutex::new(HashMap::new()),
            jacobians: Mutex::new(HashMap::new()),
        }
    }

    /// Name of an exact polynomial map: the approximant is the function.
    pub fn exact_polynomial(components: Vec<MultiPoly>, margin: Rat) -> Self {
        Self::new(components.into_iter().map(ComponentSpec::Poly).collect(), margin)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn margin(&self) -> &Rat {
        &self.margin
    }

    /// Enlarged cube on which the approximation promise holds.
    pub fn domain(&self) -> IntervalVector {
        let r = Rat::one() + &self.margin;
        IntervalVector::new(vec![RationalInterval::new(-r.clone(), r.clone()); self.dim])
    }

    /// The approximant for accuracy index `k` (memoized; providers are pure).
    pub fn approximant(&self, k: u32) -> Arc<PolyApproximant> {
        if let Some(p) = self.approximants.lock().unwrap().get(&k) {
            return p.clone();
        }
        let radius = Rat::one() + &self.margin;
        let components = self
            .components
            .iter()
            .map(|c| match c {
                ComponentSpec::Poly(p) => p.clone(),
                ComponentSpec::Analytic { kind, arg, scale, shift } => {
                    taylor_component(*kind, arg, scale, shift, k, &radius)
                }
            })
            .collect();
        let approx = Arc::new(PolyApproximant {
            k,
            error: pow2(-(k as i32)),
            components,
        });
        self.approximants.lock().unwrap().insert(k, approx.clone());
        approx
    }

    /// Symbolic partials of the approximant, row per component (memoized).
    pub fn jacobian_polys(&self, k: u32) -> Arc<Vec<Vec<MultiPoly>>> {
        if let Some(j) = self.jacobians.lock().unwrap().get(&k) {
            return j.clone();
        }
        let approx = self.approximant(k);
        let rows: Vec<Vec<MultiPoly>> = approx
            .components
            .iter()
            .map(|p| (0..self.dim).map(|a| p.partial(a)).collect())
            .collect();
        let rows = Arc::new(rows);
        self.jacobians.lock().unwrap().insert(k, rows.clone());
        rows
    }

    /// Sound enclosure of `f(y)` for every `y` in the box `x`.
    pub fn eval_enclosure(&self, x: &IntervalVector, k: u32) -> Result<IntervalVector, OracleError> {
        self.check_domain(x)?;
        let approx = self.approximant(k);
        let err = &approx.error;
        Ok(IntervalVector::new(
            approx
                .components
                .iter()
                .map(|p| p.eval_interval(x).inflate(err))
                .collect(),
        ))
    }

    /// Sound enclosure of `Df(y)` (entrywise) for every `y` in the box `x`.
    ///
    /// Each entry of the approximant Jacobian is inflated by the full `2^-k`:
    /// the promise bounds the operator norm of the Jacobian error, which
    /// dominates every single entry.
    pub fn jac_enclosure(&self, x: &IntervalVector, k: u32) -> Result<IntervalMatrix, OracleError> {
        self.check_domain(x)?;
        let rows = self.jacobian_polys(k);
        let err = pow2(-(k as i32));
        Ok(IntervalMatrix::new(
            rows.iter()
                .map(|row| row.iter().map(|p| p.eval_interval(x).inflate(&err)).collect())
                .collect(),
        ))
    }

    fn check_domain(&self, x: &IntervalVector) -> Result<(), OracleError> {
        if x.dim() != self.dim {
            return Err(OracleError::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        if !self.domain().contains_box(x) {
            return Err(OracleError::DomainViolation);
        }
        Ok(())
    }

    /// Lipschitz bound for the approximant Jacobian on the enlarged cube,
    /// from coefficient bounds on all second partials. Exact and closed form,
    /// never a numerical optimization.
    pub fn jacobian_lipschitz_bound(&self, k: u32) -> Rat {
        let radius = Rat::one() + &self.margin;
        let rows = self.jacobian_polys(k);
        let mut best = Rat::zero();
        for row in rows.iter() {
            let mut row_sum = Rat::zero();
            for entry in row {
                for b in 0..self.dim {
                    row_sum += entry.partial(b).abs_bound_on_cube(&radius);
                }
            }
            if row_sum > best {
                best = row_sum;
            }
        }
        best
    }
}

/// Truncated Taylor approximant for `scale * kind(arg) + shift`, with degree
/// chosen so that both the value error and the Jacobian row error stay below
/// `2^-k` on the cube of the given radius.
fn taylor_component(
    kind: BuiltinKind,
    arg: &MultiPoly,
    scale: &Rat,
    shift: &Rat,
    k: u32,
    radius: &Rat,
) -> MultiPoly {
    let target = pow2(-(k as i32));
    let arg_bound = arg.abs_bound_on_cube(radius);
    // sum over b of sup |d arg / d x_b|, bounding the Jacobian row factor
    let mut grad_sum = Rat::zero();
    for b in 0..arg.dim() {
        grad_sum += arg.partial(b).abs_bound_on_cube(radius);
    }
    // e^R <= 3^ceil(R) gives a rational bound for the exp remainder scale
    let exp_scale = match kind {
        BuiltinKind::Exp => {
            let ceil_r = arg_bound.ceil().to_integer();
            let mut e = Rat::one();
            let mut i = num_bigint::BigInt::zero();
            while i < ceil_r {
                e *= Rat::from_integer(3.into());
                i += 1;
            }
            e
        }
        _ => Rat::one(),
    };
    let scale_abs = scale.abs();
    // find the smallest degree whose Lagrange remainder meets the budget
    let mut n = 1u32;
    let mut pow_r = arg_bound.clone(); // R^n
    let mut fact = Rat::one(); // n!
    loop {
        fact *= Rat::from_integer(n.into());
        // value remainder R^{n+1}/(n+1)! and derivative remainder R^n/n!
        let rem_deriv = &pow_r / &fact;
        let rem_val = &rem_deriv * &arg_bound / Rat::from_integer((n + 1).into());
        let total = (&scale_abs * &exp_scale) * (rem_val + rem_deriv * &grad_sum);
        if total < target {
            break;
        }
        n += 1;
        pow_r *= &arg_bound;
        assert!(n < 10_000, "Taylor degree search diverged");
    }
    let coeffs = taylor_coeffs(kind, n);
    let mut p = MultiPoly::compose_univariate(&coeffs, arg).scale(scale);
    if !shift.is_zero() {
        p = p.add(&MultiPoly::constant(arg.dim(), shift.clone()));
    }
    p
}

/// Taylor coefficients of the builtin at 0, through degree `n`.
fn taylor_coeffs(kind: BuiltinKind, n: u32) -> Vec<Rat> {
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut fact = Rat::one();
    for i in 0..=n {
        if i > 0 {
            fact *= Rat::from_integer(i.into());
        }
        let c = match kind {
            BuiltinKind::Exp => fact.recip(),
            BuiltinKind::Sin => {
                if i % 2 == 1 {
                    let sign = if (i / 2) % 2 == 0 { Rat::one() } else { -Rat::one() };
                    sign * fact.recip()
                } else {
                    Rat::zero()
                }
            }
            BuiltinKind::Cos => {
                if i % 2 == 0 {
                    let sign = if (i / 2) % 2 == 0 { Rat::one() } else { -Rat::one() };
                    sign * fact.recip()
                } else {
                    Rat::zero()
                }
            }
        };
        coeffs.push(c);
    }
    coeffs
}

/// Rational upper bound for `max_K max{ ||Df||_inf, |det Df|, 1 }` within the
/// requested tolerance `2^-precision`, by branch and bound over Jacobian
/// enclosures. Always an over-estimate of the true maximum, never an
/// under-estimate, so it is safe wherever a Lipschitz-type constant is needed.
pub fn compute_m(f: &C1Name, precision: u32) -> Rat {
    let tol = pow2(-(precision as i32));
    let k0 = precision + 4;
    let d = f.dim();
    let root = IntervalVector::new(vec![
        RationalInterval::new(-Rat::one(), Rat::one());
        d
    ]);
    let jac_gauge = |b: &IntervalVector, k: u32| -> RationalInterval {
        let j = f.jac_enclosure(b, k).expect("cube is inside the domain");
        j.inf_norm().max_with(&j.det().abs())
    };
    let mut boxes: Vec<(IntervalVector, RationalInterval)> = vec![(root.clone(), jac_gauge(&root, k0))];
    // lower bound from the box midpoints visited so far
    let mut lower = jac_gauge(&IntervalVector::from_point(&root.midpoint()), k0)
        .lo()
        .clone();
    let mut rounds = 0u32;
    loop {
        let (upper, widest) = {
            let mut best = boxes[0].1.hi().clone();
            let mut idx = 0;
            for (i, (_, g)) in boxes.iter().enumerate().skip(1) {
                if *g.hi() > best {
                    best = g.hi().clone();
                    idx = i;
                }
            }
            (best, idx)
        };
        if &upper - &lower <= tol || rounds >= 100_000 {
            let m_hat = if upper < Rat::one() { Rat::one() } else { upper };
            return m_hat;
        }
        let (b, _) = boxes.swap_remove(widest);
        let (left, right) = b.bisect();
        for child in [left, right] {
            let width = child.max_width();
            let k = k_for_width(k0, &width);
            let g = jac_gauge(&child, k);
            let mid = jac_gauge(&IntervalVector::from_point(&child.midpoint()), k);
            if *mid.lo() > lower {
                lower = mid.lo().clone();
            }
            boxes.push((child, g));
        }
        rounds += 1;
    }
}

/// Accuracy index scaled to the box width so enclosures tighten as boxes
/// shrink: roughly the smallest `k` with `2^-k` below the width, clamped to a
/// window above `base`.
pub(crate) fn k_for_width(base: u32, width: &Rat) -> u32 {
    if width.is_zero() {
        return base + 16;
    }
    let num_bits = width.numer().magnitude().bits() as i64;
    let den_bits = width.denom().magnitude().bits() as i64;
    // width >= 2^(num_bits - den_bits - 1), so this k puts 2^-k at or below it
    let need = (den_bits - num_bits + 1).max(0) as u32;
    (base.max(need) + 2).min(base + 256)
}

/// The radii making the first-order Taylor error bound effective: whenever
/// `||h|| <= r(m)` and `x` is in the cube, the linearization error of `f` at
/// `x` in direction `h` is at most `2^{-m-1} ||h||`.
pub struct ModulusSequence {
    name: Arc<C1Name>,
    memo: Mutex<Vec<Rat>>,
}

impl ModulusSequence {
    pub fn r(&self, m: u32) -> Rat {
        assert!(m >= 1);
        let mut memo = self.memo.lock().unwrap();
        while memo.len() < m as usize {
            let next_m = memo.len() as u32 + 1;
            let prev = memo.last().cloned();
            let candidate = self.candidate(next_m);
            let r = match prev {
                Some(p) if p < candidate => p,
                _ => candidate,
            };
            memo.push(r);
        }
        memo[m as usize - 1].clone()
    }

    /// Radius from the chain: Jacobian error of the approximant (twice) plus
    /// its Lipschitz drift stay below `2^{-m-1}` inside the radius.
    fn candidate(&self, m: u32) -> Rat {
        let k = m + 3; // 2 * 2^-k <= 2^{-m-2}
        let lips = self.name.jacobian_lipschitz_bound(k);
        let mut r = Rat::one();
        if *self.name.margin() < r {
            r = self.name.margin().clone();
        }
        if !lips.is_zero() {
            let denom = if lips < Rat::one() { Rat::one() } else { lips };
            let drift = pow2(-(m as i32 + 2)) / denom;
            if drift < r {
                r = drift;
            }
        }
        r
    }
}

pub fn modulus_sequence(name: Arc<C1Name>) -> ModulusSequence {
    ModulusSequence {
        name,
        memo: Mutex::new(Vec::new()),
    }
}
