//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! These are the only function representations the certifier ever touches:
//! each approximant component is a `MultiPoly`, evaluated over boxes by a
//! recursive Horner scheme (one variable at a time, minimal interval powers
//! across gaps) and differentiated symbolically.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::interval::{IntervalVector, Rat, RationalInterval};

/// Polynomial in `dim` variables, keyed by exponent tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(vec![0; dim], c);
        }
        p
    }

    /// The coordinate polynomial `x_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut powers = vec![0; dim];
        powers[i] = 1;
        let mut p = Self::zero(dim);
        p.terms.insert(powers, Rat::one());
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rat)>) -> Self {
        let mut p = Self::zero(dim);
        for (powers, coeff) in terms {
            assert_eq!(powers.len(), dim, "exponent tuple length must equal dimension");
            p.add_term(powers, coeff);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|p| p.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, powers: Vec<u32>, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(powers);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(p, a)| (p.clone(), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                let powers: Vec<u32> = pa.iter().zip(pb).map(|(a, b)| a + b).collect();
                out.add_term(powers, ca * cb);
            }
        }
        out
    }

    /// Partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.dim);
        let mut out = Self::zero(self.dim);
        for (p, c) in &self.terms {
            if p[i] == 0 {
                continue;
            }
            let mut q = p.clone();
            q[i] -= 1;
            out.add_term(q, c * Rat::from_integer(p[i].into()));
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval_point(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.dim);
        let mut acc = Rat::zero();
        for (p, c) in &self.terms {
            let mut t = c.clone();
            for (e, xi) in p.iter().zip(x) {
                for _ in 0..*e {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }

    /// Interval range enclosure over a box, by recursive Horner evaluation.
    pub fn eval_interval(&self, x: &IntervalVector) -> RationalInterval {
        assert_eq!(x.dim(), self.dim);
        let terms: Vec<(&[u32], &Rat)> = self.terms.iter().map(|(p, c)| (p.as_slice(), c)).collect();
        horner(&terms, 0, x)
    }

    /// Upper bound for `sup |p|` on the centered cube of the given radius,
    /// from the triangle inequality on coefficients. Exact rational, cheap,
    /// and valid on any sub-box of that cube.
    pub fn abs_bound_on_cube(&self, radius: &Rat) -> Rat {
        assert!(radius.is_positive());
        let mut acc = Rat::zero();
        for (p, c) in &self.terms {
            let mut t = c.abs();
            let total: u32 = p.iter().sum();
            for _ in 0..total {
                t *= radius;
            }
            acc += t;
        }
        acc
    }

    /// Substitute a polynomial for the single variable of a univariate
    /// coefficient list: computes `sum coeffs[i] * inner^i` by Horner.
    pub fn compose_univariate(coeffs: &[Rat], inner: &Self) -> Self {
        let dim = inner.dim;
        let mut acc = Self::zero(dim);
        for c in coeffs.iter().rev() {
            acc = acc.mul(inner);
            acc.add_term(vec![0; dim], c.clone());
        }
        acc
    }
}

/// Horner over variable `var`, grouping terms by their `var` exponent and
/// recursing on the remaining variables.
fn horner(terms: &[(&[u32], &Rat)], var: usize, x: &IntervalVector) -> RationalInterval {
    if terms.is_empty() {
        return RationalInterval::zero();
    }
    if var == x.dim() {
        // all exponents consumed; at most one term remains per group
        let mut acc = RationalInterval::zero();
        for (_, c) in terms {
            acc = acc.add(&RationalInterval::point((*c).clone()));
        }
        return acc;
    }
    // group by exponent of `var`, descending
    let mut groups: BTreeMap<u32, Vec<(&[u32], &Rat)>> = BTreeMap::new();
    for (p, c) in terms {
        groups.entry(p[var]).or_default().push((p, c));
    }
    let xi = x.component(var);
    let mut acc: Option<RationalInterval> = None;
    let mut prev_exp = 0u32;
    for (&e, group) in groups.iter().rev() {
        let inner = horner(group, var + 1, x);
        acc = Some(match acc {
            None => {
                prev_exp = e;
                inner
            }
            Some(a) => {
                let gap = prev_exp - e;
                prev_exp = e;
                a.mul(&xi.pow(gap)).add(&inner)
            }
        });
    }
    let acc = acc.expect("nonempty groups");
    if prev_exp > 0 {
        acc.mul(&xi.pow(prev_exp))
    } else {
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    fn x2_minus_quarter() -> MultiPoly {
        MultiPoly::from_terms(1, vec![(vec![2], rat(1, 1)), (vec![0], rat(-1, 4))])
    }

    #[test]
    fn eval_point_exact() {
        let p = x2_minus_quarter();
        assert_eq!(p.eval_point(&[rat(1, 2)]), rat(0, 1));
        assert_eq!(p.eval_point(&[rat(3, 4)]), rat(5, 16));
    }

    #[test]
    fn horner_range_is_exact_for_x2() {
        // range of x^2 - 1/4 over [0.4, 0.6] is [-0.09, 0.11]; Horner with
        // minimal powers reproduces it exactly here
        let p = x2_minus_quarter();
        let b = IntervalVector::new(vec![RationalInterval::new(rat(2, 5), rat(3, 5))]);
        let r = p.eval_interval(&b);
        assert_eq!(r, RationalInterval::new(rat(-9, 100), rat(11, 100)));
    }

    #[test]
    fn horner_handles_straddling_even_power() {
        let p = MultiPoly::from_terms(1, vec![(vec![2], rat(1, 1))]);
        let b = IntervalVector::new(vec![RationalInterval::new(rat(-1, 1), rat(1, 2))]);
        assert_eq!(p.eval_interval(&b), RationalInterval::new(rat(0, 1), rat(1, 1)));
    }

    #[test]
    fn partial_derivative() {
        // d/dx (x^2 y + 3y) = 2xy
        let p = MultiPoly::from_terms(
            2,
            vec![(vec![2, 1], rat(1, 1)), (vec![0, 1], rat(3, 1))],
        );
        let dx = p.partial(0);
        assert_eq!(
            dx,
            MultiPoly::from_terms(2, vec![(vec![1, 1], rat(2, 1))])
        );
        let dy = p.partial(1);
        assert_eq!(
            dy,
            MultiPoly::from_terms(2, vec![(vec![2, 0], rat(1, 1)), (vec![0, 0], rat(3, 1))])
        );
    }

    #[test]
    fn abs_bound_dominates_samples() {
        let p = MultiPoly::from_terms(
            2,
            vec![(vec![2, 0], rat(1, 1)), (vec![0, 2], rat(1, 1)), (vec![0, 0], rat(-1, 2))],
        );
        let bound = p.abs_bound_on_cube(&rat(5, 4));
        for (a, b) in [(rat(5, 4), rat(5, 4)), (rat(-5, 4), rat(1, 1)), (rat(0, 1), rat(0, 1))] {
            assert!(p.eval_point(&[a, b]).abs() <= bound);
        }
    }

    #[test]
    fn compose_univariate_matches_direct() {
        // (2u^2 + 1) with u = x + 1  ->  2x^2 + 4x + 3
        let inner = MultiPoly::from_terms(1, vec![(vec![1], rat(1, 1)), (vec![0], rat(1, 1))]);
        let composed = MultiPoly::compose_univariate(&[rat(1, 1), rat(0, 1), rat(2, 1)], &inner);
        let expected = MultiPoly::from_terms(
            1,
            vec![(vec![2], rat(2, 1)), (vec![1], rat(4, 1)), (vec![0], rat(3, 1))],
        );
        assert_eq!(composed, expected);
    }

    #[test]
    fn interval_eval_contains_point_samples() {
        let p = MultiPoly::from_terms(
            2,
            vec![
                (vec![2, 0], rat(1, 1)),
                (vec![0, 2], rat(1, 1)),
                (vec![1, 1], rat(-1, 3)),
                (vec![0, 0], rat(-1, 2)),
            ],
        );
        let b = IntervalVector::new(vec![
            RationalInterval::new(rat(-1, 3), rat(1, 2)),
            RationalInterval::new(rat(1, 5), rat(4, 5)),
        ]);
        let enc = p.eval_interval(&b);
        for (s, t) in [(0, 0), (1, 0), (0, 1), (1, 1), (1, 2)] {
            let x = rat(-1, 3) + rat(s, 2) * (rat(1, 2) - rat(-1, 3));
            let y = rat(1, 5) + rat(t, 2) * (rat(4, 5) - rat(1, 5));
            assert!(enc.contains(&p.eval_point(&[x, y])));
        }
    }
}
