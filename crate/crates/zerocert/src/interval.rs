//! Exact-endpoint interval arithmetic over rationals.
//!
//! Every operation returns an interval that contains the exact real result
//! for all point selections from its inputs; endpoints are arbitrary-precision
//! rationals so there is no rounding error. Vectors carry the max norm and
//! matrices the induced operator norm (max row sum), which is the norm used
//! throughout the certifier.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Exact power of two, `2^e` for any sign of `e`.
pub fn pow2(e: i32) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::one() << e as usize)
    } else {
        Rat::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Smallest integer `m >= floor` with `2^-m < x`; `None` if `x <= 0`.
pub fn exponent_below(x: &Rat, floor: u32) -> Option<u32> {
    if !x.is_positive() {
        return None;
    }
    let mut m = floor;
    // x > 2^-m fails only finitely often for positive x.
    while pow2(-(m as i32)) >= *x {
        m += 1;
        if m > 4096 {
            return None; // absurdly small floor; treat as non-certifiable
        }
    }
    Some(m)
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    lo: Rat,
    hi: Rat,
}

impl RationalInterval {
    /// New interval; panics if `lo > hi`.
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    /// Degenerate interval `[x, x]`.
    pub fn point(x: Rat) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rat::zero())
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = candidates[0].clone();
        let mut hi = candidates[0].clone();
        for c in &candidates[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Self { lo, hi }
    }

    /// Scale by an exact rational.
    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_negative() {
            Self {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            Self {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    /// `|X|` as a set image: minimal enclosure of `{|x| : x in X}`.
    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = if -self.lo.clone() > self.hi {
                -self.lo.clone()
            } else {
                self.hi.clone()
            };
            Self { lo: Rat::zero(), hi: m }
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Enclosure of `max(x, y)` over all selections; minimal.
    pub fn max_with(&self, other: &Self) -> Self {
        Self {
            lo: if self.lo > other.lo { self.lo.clone() } else { other.lo.clone() },
            hi: if self.hi > other.hi { self.hi.clone() } else { other.hi.clone() },
        }
    }

    /// Enclosure of `min(x, y)` over all selections; minimal.
    pub fn min_with(&self, other: &Self) -> Self {
        Self {
            lo: if self.lo < other.lo { self.lo.clone() } else { other.lo.clone() },
            hi: if self.hi < other.hi { self.hi.clone() } else { other.hi.clone() },
        }
    }

    /// Convex hull of the two intervals.
    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: if self.lo < other.lo { self.lo.clone() } else { other.lo.clone() },
            hi: if self.hi > other.hi { self.hi.clone() } else { other.hi.clone() },
        }
    }

    /// `X^e` for a natural exponent, minimal (even powers treat straddling of 0).
    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::point(Rat::one());
        }
        if e == 1 {
            return self.clone();
        }
        let lo_p = pow_rat(&self.lo, e);
        let hi_p = pow_rat(&self.hi, e);
        if e % 2 == 1 {
            Self { lo: lo_p, hi: hi_p }
        } else if !self.lo.is_negative() {
            Self { lo: lo_p, hi: hi_p }
        } else if !self.hi.is_positive() {
            Self { lo: hi_p, hi: lo_p }
        } else {
            let m = if lo_p > hi_p { lo_p } else { hi_p };
            Self { lo: Rat::zero(), hi: m }
        }
    }

    /// Symmetric inflation by `delta >= 0`.
    pub fn inflate(&self, delta: &Rat) -> Self {
        assert!(!delta.is_negative());
        Self {
            lo: &self.lo - delta,
            hi: &self.hi + delta,
        }
    }

    /// Outward rounding to dyadic endpoints with denominator `2^p`.
    ///
    /// Widens the interval, never shrinks it, so all enclosures stay sound;
    /// used to cap rational bit growth during deep refinement.
    pub fn round_out(&self, p: u32) -> Self {
        Self {
            lo: dyadic_floor(&self.lo, p),
            hi: dyadic_ceil(&self.hi, p),
        }
    }

    /// Interval division; panics if the divisor contains zero.
    pub(crate) fn div(&self, other: &Self) -> Self {
        assert!(
            other.lo.is_positive() || other.hi.is_negative(),
            "interval division by an interval containing zero"
        );
        let inv = Self {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
        };
        self.mul(&inv)
    }
}

fn pow_rat(x: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Largest multiple of `2^-p` that is `<= x`.
pub fn dyadic_floor(x: &Rat, p: u32) -> Rat {
    let scaled = x * pow2(p as i32);
    Rat::new(scaled.floor().to_integer(), BigInt::one() << p as usize)
}

/// Smallest multiple of `2^-p` that is `>= x`.
pub fn dyadic_ceil(x: &Rat, p: u32) -> Rat {
    let scaled = x * pow2(p as i32);
    Rat::new(scaled.ceil().to_integer(), BigInt::one() << p as usize)
}

/// Vector of intervals; a box in `R^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalVector {
    components: Vec<RationalInterval>,
}

impl IntervalVector {
    pub fn new(components: Vec<RationalInterval>) -> Self {
        assert!(!components.is_empty(), "dimension must be at least 1");
        Self { components }
    }

    pub fn from_point(p: &[Rat]) -> Self {
        Self::new(p.iter().cloned().map(RationalInterval::point).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &RationalInterval {
        &self.components[i]
    }

    pub fn components(&self) -> &[RationalInterval] {
        &self.components
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    /// Enclosure of the max norm `||x||_inf` over the box.
    pub fn inf_norm(&self) -> RationalInterval {
        let mut acc = self.components[0].abs();
        for c in &self.components[1..] {
            acc = acc.max_with(&c.abs());
        }
        acc
    }

    pub fn contains_point(&self, p: &[Rat]) -> bool {
        p.len() == self.dim() && self.components.iter().zip(p).all(|(c, x)| c.contains(x))
    }

    pub fn contains_box(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.contains_interval(b))
    }

    /// Largest component width (the bisection heuristic key).
    pub fn max_width(&self) -> Rat {
        self.components
            .iter()
            .map(|c| c.width())
            .max()
            .expect("nonempty")
    }

    /// Split in two along the widest axis; deterministic tie-break on index.
    pub fn bisect(&self) -> (Self, Self) {
        let mut axis = 0;
        let mut best = self.components[0].width();
        for (i, c) in self.components.iter().enumerate().skip(1) {
            let w = c.width();
            if w > best {
                best = w;
                axis = i;
            }
        }
        let mid = self.components[axis].midpoint();
        let mut left = self.components.clone();
        let mut right = self.components.clone();
        left[axis] = RationalInterval::new(self.components[axis].lo().clone(), mid.clone());
        right[axis] = RationalInterval::new(mid, self.components[axis].hi().clone());
        (Self::new(left), Self::new(right))
    }

    pub fn round_out(&self, p: u32) -> Self {
        Self::new(self.components.iter().map(|c| c.round_out(p)).collect())
    }

    pub fn midpoint(&self) -> Vec<Rat> {
        self.components.iter().map(|c| c.midpoint()).collect()
    }
}

/// Square matrix of intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalMatrix {
    entries: Vec<Vec<RationalInterval>>,
}

impl IntervalMatrix {
    pub fn new(entries: Vec<Vec<RationalInterval>>) -> Self {
        let d = entries.len();
        assert!(d >= 1);
        assert!(entries.iter().all(|row| row.len() == d), "matrix must be square");
        Self { entries }
    }

    pub fn identity(d: usize) -> Self {
        let mut entries = vec![vec![RationalInterval::zero(); d]; d];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = RationalInterval::point(Rat::one());
        }
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalInterval {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<RationalInterval>] {
        &self.entries
    }

    /// Enclosure of the operator inf-norm, `max_i sum_j |a_ij|`.
    pub fn inf_norm(&self) -> RationalInterval {
        let mut acc: Option<RationalInterval> = None;
        for row in &self.entries {
            let mut sum = RationalInterval::zero();
            for a in row {
                sum = sum.add(&a.abs());
            }
            acc = Some(match acc {
                None => sum,
                Some(prev) => prev.max_with(&sum),
            });
        }
        acc.expect("nonempty")
    }

    /// Enclosure of the determinant over all point matrices in the box.
    ///
    /// Cofactor expansion up to 3x3; interval LU with magnitude pivoting
    /// beyond that, falling back to a Hadamard-type bound when every pivot
    /// candidate straddles zero.
    pub fn det(&self) -> RationalInterval {
        match self.dim() {
            1 => self.entries[0][0].clone(),
            2 => {
                let ad = self.entries[0][0].mul(&self.entries[1][1]);
                let bc = self.entries[0][1].mul(&self.entries[1][0]);
                ad.sub(&bc)
            }
            3 => {
                let e = &self.entries;
                let m0 = e[1][1].mul(&e[2][2]).sub(&e[1][2].mul(&e[2][1]));
                let m1 = e[1][0].mul(&e[2][2]).sub(&e[1][2].mul(&e[2][0]));
                let m2 = e[1][0].mul(&e[2][1]).sub(&e[1][1].mul(&e[2][0]));
                e[0][0]
                    .mul(&m0)
                    .sub(&e[0][1].mul(&m1))
                    .add(&e[0][2].mul(&m2))
            }
            _ => self.det_lu(),
        }
    }

    fn det_lu(&self) -> RationalInterval {
        let d = self.dim();
        let mut a = self.entries.clone();
        let mut det = RationalInterval::point(Rat::one());
        for col in 0..d {
            // Pivot: the row whose diagonal candidate has the largest mignitude
            // (distance of the interval from zero); rows straddling zero have
            // mignitude zero and are avoided when possible.
            let mut pivot = None;
            let mut best_span = Rat::zero();
            for (r, row) in a.iter().enumerate().skip(col) {
                let c = &row[col];
                let mig = if c.lo().is_positive() {
                    c.lo().clone()
                } else if c.hi().is_negative() {
                    -c.hi().clone()
                } else {
                    Rat::zero()
                };
                if pivot.is_none() || mig > best_span {
                    best_span = mig;
                    pivot = Some(r);
                }
            }
            let p = pivot.expect("nonempty column");
            if !(a[p][col].lo().is_positive() || a[p][col].hi().is_negative()) {
                // No invertible pivot available: bound the remaining minor by
                // the product of its row 1-norms and fold in the pivots so far.
                let mut bound = Rat::one();
                for row in a.iter().skip(col) {
                    let mut s = Rat::zero();
                    for c in row.iter().skip(col) {
                        let ab = c.abs();
                        s += ab.hi();
                    }
                    bound *= s;
                }
                let minor = RationalInterval::new(-bound.clone(), bound);
                return det.mul(&minor);
            }
            if p != col {
                a.swap(p, col);
                det = det.neg();
            }
            let pivot_iv = a[col][col].clone();
            det = det.mul(&pivot_iv);
            for r in col + 1..d {
                let factor = a[r][col].div(&pivot_iv);
                for c in col + 1..d {
                    let delta = factor.mul(&a[col][c]);
                    a[r][c] = a[r][c].sub(&delta);
                }
            }
        }
        det
    }

    pub fn round_out(&self, p: u32) -> Self {
        Self::new(
            self.entries
                .iter()
                .map(|row| row.iter().map(|c| c.round_out(p)).collect())
                .collect(),
        )
    }
}

/// Outcome of a soft comparison against a threshold `t`.
///
/// `Above` certifies the approximated quantity exceeds `t`; `Below` certifies
/// it is at most `2t`. The two certificates overlap, which is what makes the
/// decision computable from approximations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SoftCmp {
    Above,
    Below,
}

/// Decide `q > t` versus `q <= 2t` from an enclosure of `q` of width `t/2`.
///
/// `approx` must return an interval containing the exact value of `q` whose
/// width is at most the requested bound. Whichever branch is returned, the
/// corresponding inequality holds for the exact value of `q`.
pub fn soft_compare<F>(mut approx: F, threshold: &Rat) -> SoftCmp
where
    F: FnMut(&Rat) -> RationalInterval,
{
    assert!(threshold.is_positive());
    let width = threshold / Rat::from_integer(BigInt::from(2));
    let enc = approx(&width);
    assert!(enc.width() <= width, "approximation did not honor requested width");
    let r = enc.hi();
    if *r <= threshold * rat(3, 2) {
        SoftCmp::Below
    } else {
        SoftCmp::Above
    }
}
