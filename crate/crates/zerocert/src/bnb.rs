//! Branch-and-bound refinement of interval enclosures.
//!
//! Both soft decisions of the certifier reduce to bounding the minimum of a
//! nonnegative quantity over a box region: the distance of the image set from
//! zero, and the Jacobian gauge over an enlarged neighborhood. The engine
//! refines a best-first queue of sub-boxes, tightening the approximant index
//! as boxes shrink, until one of two overlapping certificates becomes
//! available. All decisions are made on exact rational endpoints, so a
//! returned certificate is a proof, not a heuristic.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Zero;

use crate::interval::{IntervalVector, Rat, RationalInterval};
use crate::oracle::k_for_width;

/// The refinement loop gave up before reaching a certificate.
#[derive(Debug, Clone)]
pub struct RoundsExhausted;

/// Certified outcome of a soft minimum decision.
#[derive(Debug, Clone)]
pub enum MinDecision {
    /// The minimum exceeds the upper threshold; carries the certified lower
    /// bound actually achieved (at least as strong as the threshold).
    Above(Rat),
    /// The minimum is at most the lower certificate threshold.
    Below,
}

struct Cell {
    cell: IntervalVector,
    enc: RationalInterval,
    k: u32,
}

/// Best-first queue over cells keyed by enclosure lower bound, with a running
/// upper estimate of the true minimum (the smallest enclosure upper bound
/// seen; the minimum over a cell never exceeds its enclosure's upper bound).
struct Queue {
    cells: Vec<Option<Cell>>,
    heap: BinaryHeap<Reverse<(Rat, usize)>>,
    upper_est: Option<Rat>,
}

impl Queue {
    fn new() -> Self {
        Self {
            cells: Vec::new(),
            heap: BinaryHeap::new(),
            upper_est: None,
        }
    }

    fn push(&mut self, cell: Cell) {
        if self.upper_est.as_ref().map_or(true, |u| cell.enc.hi() < u) {
            self.upper_est = Some(cell.enc.hi().clone());
        }
        let idx = self.cells.len();
        self.heap.push(Reverse((cell.enc.lo().clone(), idx)));
        self.cells.push(Some(cell));
    }

    /// Smallest enclosure lower bound over live cells: a certified lower
    /// bound for the minimum over the whole region.
    fn global_lo(&self) -> &Rat {
        &self.heap.peek().expect("region is nonempty").0 .0
    }

    fn pop_weakest(&mut self) -> Cell {
        let Reverse((_, idx)) = self.heap.pop().expect("region is nonempty");
        self.cells[idx].take().expect("heap entries are live")
    }

    fn upper_est(&self) -> &Rat {
        self.upper_est.as_ref().expect("initialized on first push")
    }
}

/// Decide `min g > theta_above` versus `min g <= theta_below` over the given
/// region, for `theta_above < theta_below`.
///
/// `enclose` must return an interval containing `g(y)` for every point `y` of
/// the cell, tighter for larger accuracy index. With `sharpen` set, after the
/// `Above` certificate is reached the loop keeps refining until the certified
/// lower bound is within a factor two of the upper estimate of the minimum,
/// which is what the caller uses to extract a quality exponent.
pub fn soft_min<G>(
    region: &[IntervalVector],
    mut enclose: G,
    theta_above: &Rat,
    theta_below: &Rat,
    base_k: u32,
    sharpen: bool,
    max_rounds: u32,
) -> Result<MinDecision, RoundsExhausted>
where
    G: FnMut(&IntervalVector, u32) -> RationalInterval,
{
    assert!(theta_above < theta_below);
    let mut queue = Queue::new();
    for cell in region {
        let k = k_for_width(base_k, &cell.max_width());
        let enc = enclose(cell, k);
        queue.push(Cell { cell: cell.clone(), enc, k });
    }
    for _ in 0..max_rounds {
        let global_lo = queue.global_lo().clone();
        if global_lo > *theta_above {
            let sharp_enough = &global_lo + &global_lo > *queue.upper_est();
            if !sharpen || sharp_enough {
                return Ok(MinDecision::Above(global_lo));
            }
        } else if queue.upper_est() <= theta_below {
            return Ok(MinDecision::Below);
        }
        refine_step(&mut queue, &mut enclose, base_k);
    }
    Err(RoundsExhausted)
}

/// Certified lower bound for `min g` over the region, refined best-first
/// until it reaches `target`, or until the target is provably out of reach
/// (the upper estimate of the minimum sits below it) and the bound is sharp,
/// or until the round budget runs out. The returned value is always a sound
/// lower bound; reaching `target` is not guaranteed.
pub fn refine_min_lower<G>(
    region: &[IntervalVector],
    mut enclose: G,
    target: &Rat,
    base_k: u32,
    max_rounds: u32,
) -> Rat
where
    G: FnMut(&IntervalVector, u32) -> RationalInterval,
{
    let mut queue = Queue::new();
    for cell in region {
        let k = k_for_width(base_k, &cell.max_width());
        let enc = enclose(cell, k);
        queue.push(Cell { cell: cell.clone(), enc, k });
    }
    for _ in 0..max_rounds {
        let global_lo = queue.global_lo().clone();
        if global_lo >= *target {
            return global_lo;
        }
        // if the true minimum certifiably undershoots the target, stop once
        // the bound is within a factor two of it instead of splitting forever
        if queue.upper_est() < target && &global_lo + &global_lo >= *queue.upper_est() {
            return global_lo;
        }
        refine_step(&mut queue, &mut enclose, base_k);
    }
    queue.global_lo().clone()
}

fn refine_step<G>(queue: &mut Queue, enclose: &mut G, base_k: u32)
where
    G: FnMut(&IntervalVector, u32) -> RationalInterval,
{
    let cell = queue.pop_weakest();
    if cell.cell.max_width().is_zero() {
        // point cell: only the approximant index can improve the bound
        let k = cell.k + 8;
        let enc = enclose(&cell.cell, k);
        queue.push(Cell { cell: cell.cell, enc, k });
        return;
    }
    let (a, b) = cell.cell.bisect();
    for half in [a, b] {
        let k = k_for_width(base_k, &half.max_width()).max(cell.k);
        let enc = enclose(&half, k);
        queue.push(Cell { cell: half, enc, k });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{pow2, rat};
    use crate::oracle::C1Name;
    use crate::poly::MultiPoly;

    fn quadratic() -> C1Name {
        C1Name::exact_polynomial(
            vec![MultiPoly::from_terms(
                1,
                vec![(vec![2], rat(1, 1)), (vec![0], rat(-1, 4))],
            )],
            rat(1, 4),
        )
    }

    #[test]
    fn min_norm_above_when_far_from_zero() {
        // min |x^2 - 1/4| on [-1/8, 1/8] is 15/64; certificate at 2^-6
        let f = quadratic();
        let region = [IntervalVector::new(vec![RationalInterval::new(
            rat(-1, 8),
            rat(1, 8),
        )])];
        let g = |cell: &IntervalVector, k: u32| {
            f.eval_enclosure(cell, k).unwrap().inf_norm()
        };
        match soft_min(&region, g, &pow2(-6), &pow2(-5), 9, false, 4000).unwrap() {
            MinDecision::Above(lo) => {
                assert!(lo > pow2(-6));
                assert!(lo <= rat(15, 64));
            }
            MinDecision::Below => panic!("expected Above"),
        }
    }

    #[test]
    fn min_norm_below_when_zero_inside() {
        let f = quadratic();
        let region = [IntervalVector::new(vec![RationalInterval::new(
            rat(3, 8),
            rat(5, 8),
        )])];
        let g = |cell: &IntervalVector, k: u32| {
            f.eval_enclosure(cell, k).unwrap().inf_norm()
        };
        match soft_min(&region, g, &pow2(-6), &pow2(-5), 9, false, 4000).unwrap() {
            MinDecision::Below => {}
            MinDecision::Above(_) => panic!("expected Below"),
        }
    }

    #[test]
    fn sharpened_bound_tracks_true_minimum() {
        // min |2x| over [1/2, 1] is 1; sharpened lower bound must reach > 1/2
        let f = C1Name::exact_polynomial(
            vec![MultiPoly::from_terms(1, vec![(vec![1], rat(2, 1))])],
            rat(1, 4),
        );
        let region = [IntervalVector::new(vec![RationalInterval::new(
            rat(1, 2),
            rat(1, 1),
        )])];
        let g = |cell: &IntervalVector, k: u32| {
            f.eval_enclosure(cell, k).unwrap().inf_norm()
        };
        match soft_min(&region, g, &pow2(-8), &pow2(-7), 11, true, 4000).unwrap() {
            MinDecision::Above(lo) => {
                assert!(lo > rat(1, 2));
                assert!(lo <= rat(1, 1));
            }
            MinDecision::Below => panic!("expected Above"),
        }
    }

    #[test]
    fn refine_min_lower_is_sound() {
        let f = quadratic();
        // faces of the ball around 1/2 with radius 1/8: points 3/8 and 5/8;
        // min |f(x) - f(1/2)| over them is |(3/8)^2 - 1/4| = 7/64
        let faces = [
            IntervalVector::from_point(&[rat(3, 8)]),
            IntervalVector::from_point(&[rat(5, 8)]),
        ];
        let fx = f
            .eval_enclosure(&IntervalVector::from_point(&[rat(1, 2)]), 40)
            .unwrap();
        let g = |cell: &IntervalVector, k: u32| {
            f.eval_enclosure(cell, k).unwrap().sub(&fx).inf_norm()
        };
        let lower = refine_min_lower(&faces, g, &rat(7, 64), 12, 200);
        assert!(lower <= rat(7, 64));
        assert!(lower > rat(6, 64));
    }

    #[test]
    fn refine_min_lower_bails_on_unreachable_target() {
        // true min of |2x| over [1/4, 1] is 1/2; a target of 10 can never be
        // certified, so the loop must stop early with a sharp bound instead
        // of exhausting its rounds
        let f = C1Name::exact_polynomial(
            vec![MultiPoly::from_terms(1, vec![(vec![1], rat(2, 1))])],
            rat(1, 4),
        );
        let region = [IntervalVector::new(vec![RationalInterval::new(
            rat(1, 4),
            rat(1, 1),
        )])];
        let mut evals = 0u32;
        let g = |cell: &IntervalVector, k: u32| {
            evals += 1;
            f.eval_enclosure(cell, k).unwrap().inf_norm()
        };
        let lower = refine_min_lower(&region, g, &rat(10, 1), 8, 100_000);
        assert!(lower <= rat(1, 2));
        assert!(lower >= rat(1, 4));
        assert!(evals < 200, "futile refinement should stop early, used {evals} evals");
    }
}
