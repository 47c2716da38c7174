//! Exact covers of the cube `[-1,1]^d` by axis-aligned squares of side `1/n`.
//!
//! Squares are addressed by integer grid coordinates so that tiling,
//! adjacency, and distances to the cube boundary are exact integer or
//! rational computations; the deduplication step of the certifier relies on
//! adjacency being decided without any rounding.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::interval::{rat, IntervalVector, Rat, RationalInterval};

/// Address of one grid square: resolution `n` and per-axis index `z`, naming
/// the box `prod [z_i/n, (z_i+1)/n]` with center `(z_i + 1/2)/n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridId {
    pub n: u64,
    pub coords: Vec<i64>,
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid resolution mismatch: {0} vs {1}")]
    ResolutionMismatch(u64, u64),
}

/// A closed grid square (hypercube of side `1/n`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridBox {
    pub id: GridId,
}

impl GridBox {
    pub fn new(n: u64, coords: Vec<i64>) -> Self {
        assert!(n >= 1);
        assert!(!coords.is_empty());
        assert!(
            coords.iter().all(|&z| -(n as i64) <= z && z < n as i64),
            "square must lie inside the unit cube"
        );
        Self { id: GridId { n, coords } }
    }

    pub fn dim(&self) -> usize {
        self.id.coords.len()
    }

    pub fn n(&self) -> u64 {
        self.id.n
    }

    pub fn side(&self) -> Rat {
        Rat::new(BigInt::one(), BigInt::from(self.id.n))
    }

    pub fn half_side(&self) -> Rat {
        Rat::new(BigInt::one(), BigInt::from(2 * self.id.n))
    }

    pub fn center(&self) -> Vec<Rat> {
        self.id
            .coords
            .iter()
            .map(|&z| Rat::new(BigInt::from(2 * z + 1), BigInt::from(2 * self.id.n)))
            .collect()
    }

    pub fn axis_range(&self, axis: usize) -> RationalInterval {
        let z = self.id.coords[axis];
        RationalInterval::new(
            Rat::new(BigInt::from(z), BigInt::from(self.id.n)),
            Rat::new(BigInt::from(z + 1), BigInt::from(self.id.n)),
        )
    }

    pub fn to_interval_vector(&self) -> IntervalVector {
        IntervalVector::new((0..self.dim()).map(|a| self.axis_range(a)).collect())
    }

    pub fn contains_point(&self, p: &[Rat]) -> bool {
        self.to_interval_vector().contains_point(p)
    }
}

/// The `(2n)^d` squares tiling `[-1,1]^d` exactly, in lexicographic order of
/// their coordinates.
pub fn cover(n: u64, dim: usize) -> Vec<GridBox> {
    assert!(n >= 1 && dim >= 1);
    let per_axis = 2 * n as i64;
    let mut out = Vec::with_capacity((per_axis as usize).pow(dim as u32));
    let mut coords = vec![-(n as i64); dim];
    loop {
        out.push(GridBox::new(n, coords.clone()));
        // odometer increment, least significant axis last for lex order
        let mut axis = dim;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            coords[axis] += 1;
            if coords[axis] < n as i64 {
                break;
            }
            coords[axis] = -(n as i64);
        }
    }
}

/// Exact max-norm distance from the square to the boundary of the cube.
pub fn boundary_distance(s: &GridBox) -> Rat {
    let n = s.id.n as i64;
    // distance is 1 - max over axes of max(|z|, |z+1|)/n, in closed form
    let mut worst = 0i64;
    for &z in &s.id.coords {
        let m = z.abs().max((z + 1).abs());
        if m > worst {
            worst = m;
        }
    }
    Rat::one() - Rat::new(BigInt::from(worst), BigInt::from(n))
}

/// The blocks of squares within distance `1/n` and `3/n` of `s` (inflations
/// by one and by three squares per axis). Requires the square to be at least
/// `4/n` from the boundary so both blocks stay inside the cube.
pub fn neighborhoods(s: &GridBox) -> (Vec<GridBox>, Vec<GridBox>) {
    assert!(
        boundary_distance(s) >= rat(4, s.id.n as i64),
        "neighborhoods require 4/n clearance from the boundary"
    );
    (block(s, 1), block(s, 3))
}

fn block(s: &GridBox, radius: i64) -> Vec<GridBox> {
    let dim = s.dim();
    let mut out = Vec::new();
    let mut offsets = vec![-radius; dim];
    loop {
        let coords: Vec<i64> = s
            .id
            .coords
            .iter()
            .zip(&offsets)
            .map(|(&z, &o)| z + o)
            .collect();
        out.push(GridBox::new(s.id.n, coords));
        let mut axis = dim;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            offsets[axis] += 1;
            if offsets[axis] <= radius {
                break;
            }
            offsets[axis] = -radius;
        }
    }
}

/// Bounding box of the `1/n`-inflation of `s` (same set as the 3-per-axis
/// block, as one interval vector).
pub fn inflated_box(s: &GridBox, radius: i64) -> IntervalVector {
    let n = s.id.n as i64;
    IntervalVector::new(
        (0..s.dim())
            .map(|a| {
                let r = s.axis_range(a);
                RationalInterval::new(r.lo() - rat(radius, n), r.hi() + rat(radius, n))
            })
            .collect(),
    )
}

/// Split into `j^d` sub-squares at resolution `j*n`, tiling `s` exactly.
pub fn subdivide(s: &GridBox, j: u64) -> Vec<GridBox> {
    assert!(j >= 1);
    let dim = s.dim();
    let nn = s.id.n * j;
    let mut out = Vec::with_capacity((j as usize).pow(dim as u32));
    let mut offsets = vec![0i64; dim];
    loop {
        let coords: Vec<i64> = s
            .id
            .coords
            .iter()
            .zip(&offsets)
            .map(|(&z, &o)| z * j as i64 + o)
            .collect();
        out.push(GridBox::new(nn, coords));
        let mut axis = dim;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            offsets[axis] += 1;
            if offsets[axis] < j as i64 {
                break;
            }
            offsets[axis] = 0;
        }
    }
}

/// Whether two distinct squares of the same resolution touch (share a face,
/// edge, or corner); works across parent-square boundaries since the test is
/// purely on integer coordinates.
pub fn adjacent(a: &GridId, b: &GridId) -> Result<bool, GridError> {
    if a.n != b.n {
        return Err(GridError::ResolutionMismatch(a.n, b.n));
    }
    if a.coords == b.coords {
        return Ok(false);
    }
    Ok(a
        .coords
        .iter()
        .zip(&b.coords)
        .all(|(&x, &y)| (x - y).abs() <= 1))
}

/// The parent square at resolution `n = id.n / j` containing this sub-square.
pub fn parent_of(id: &GridId, j: u64) -> GridId {
    assert!(j >= 1 && id.n % j == 0);
    GridId {
        n: id.n / j,
        coords: id.coords.iter().map(|&z| z.div_euclid(j as i64)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn cover_n1_d2_centers() {
        let c = cover(1, 2);
        assert_eq!(c.len(), 4);
        let centers: Vec<Vec<Rat>> = c.iter().map(|b| b.center()).collect();
        for expect in [
            vec![rat(-1, 2), rat(-1, 2)],
            vec![rat(-1, 2), rat(1, 2)],
            vec![rat(1, 2), rat(-1, 2)],
            vec![rat(1, 2), rat(1, 2)],
        ] {
            assert!(centers.contains(&expect));
        }
    }

    #[test]
    fn cover_n2_d1_intervals() {
        let c = cover(2, 1);
        assert_eq!(c.len(), 4);
        let ranges: Vec<(Rat, Rat)> = c
            .iter()
            .map(|b| {
                let r = b.axis_range(0);
                (r.lo().clone(), r.hi().clone())
            })
            .collect();
        assert_eq!(ranges[0], (rat(-1, 1), rat(-1, 2)));
        assert_eq!(ranges[3], (rat(1, 2), rat(1, 1)));
    }

    #[test]
    fn cover_n3_d2_tiles_exactly() {
        let c = cover(3, 2);
        assert_eq!(c.len(), 36);
        // total volume 4, computed exactly
        let vol: Rat = c.iter().map(|b| b.side() * b.side()).sum();
        assert_eq!(vol, rat(4, 1));
        // pairwise interiors disjoint: distinct coords
        for (i, a) in c.iter().enumerate() {
            for b in &c[i + 1..] {
                assert_ne!(a.id.coords, b.id.coords);
            }
        }
    }

    #[test]
    fn boundary_distances() {
        // corner square at n=3 touches the boundary
        let corner = GridBox::new(3, vec![-3, 2]);
        assert!(boundary_distance(&corner).is_zero());
        // box [0,1/3]^2 is 2/3 from the boundary
        let inner = GridBox::new(3, vec![0, 0]);
        assert_eq!(boundary_distance(&inner), rat(2, 3));
    }

    #[test]
    fn neighborhood_blocks() {
        let s = GridBox::new(8, vec![0, 0]);
        let (near, far) = neighborhoods(&s);
        assert_eq!(near.len(), 9);
        assert_eq!(far.len(), 49);
        let sv = s.to_interval_vector();
        let nv = inflated_box(&s, 1);
        let mv = inflated_box(&s, 3);
        assert!(nv.contains_box(&sv));
        assert!(mv.contains_box(&nv));
        // all blocks inside the cube
        let cube = IntervalVector::new(vec![
            RationalInterval::new(rat(-1, 1), rat(1, 1));
            2
        ]);
        for b in near.iter().chain(far.iter()) {
            assert!(cube.contains_box(&b.to_interval_vector()));
        }
    }

    #[test]
    fn neighborhood_blocks_d1() {
        let s = GridBox::new(8, vec![0]);
        let (near, far) = neighborhoods(&s);
        assert_eq!(near.len(), 3);
        assert_eq!(far.len(), 7);
    }

    #[test]
    fn containment_chain_exhaustive_n8() {
        let cube = IntervalVector::new(vec![
            RationalInterval::new(rat(-1, 1), rat(1, 1));
            2
        ]);
        for s in cover(8, 2) {
            if boundary_distance(&s) < rat(4, 8) {
                continue;
            }
            let (near, far) = neighborhoods(&s);
            let near_ids: Vec<_> = near.iter().map(|b| &b.id).collect();
            for b in &near {
                assert!(far.contains(b));
            }
            assert!(near_ids.contains(&&s.id));
            for b in &far {
                assert!(cube.contains_box(&b.to_interval_vector()));
            }
        }
    }

    #[test]
    fn subdivide_identity_and_counts() {
        let s = GridBox::new(2, vec![1, -1]);
        assert_eq!(subdivide(&s, 1), vec![s.clone()]);
        for d in 1..=3usize {
            let s = GridBox::new(2, vec![0; d]);
            for j in 2..=4u64 {
                assert_eq!(subdivide(&s, j).len(), (j as usize).pow(d as u32));
            }
        }
    }

    #[test]
    fn subdivide_union_is_parent() {
        let s = GridBox::new(2, vec![1, 0]);
        let subs = subdivide(&s, 3);
        let sv = s.to_interval_vector();
        let vol: Rat = subs.iter().map(|b| b.side() * b.side()).sum();
        assert_eq!(vol, s.side() * s.side());
        for sub in &subs {
            assert!(sv.contains_box(&sub.to_interval_vector()));
        }
    }

    #[test]
    fn subdivision_composes() {
        let s = GridBox::new(1, vec![0]);
        let twice: Vec<GridId> = subdivide(&s, 2)
            .iter()
            .flat_map(|t| subdivide(t, 3))
            .map(|b| b.id)
            .collect();
        let once: Vec<GridId> = subdivide(&s, 6).into_iter().map(|b| b.id).collect();
        let mut a = twice;
        a.sort();
        let mut b = once;
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn adjacency_cases() {
        let a = GridId { n: 4, coords: vec![0, 0] };
        let b = GridId { n: 4, coords: vec![1, 1] };
        let c = GridId { n: 4, coords: vec![2, 0] };
        assert!(adjacent(&a, &b).unwrap());
        assert!(!adjacent(&a, &c).unwrap());
        assert!(!adjacent(&a, &a).unwrap());
        assert!(adjacent(&b, &a).unwrap());
        let other = GridId { n: 8, coords: vec![0, 0] };
        assert!(adjacent(&a, &other).is_err());
    }

    #[test]
    fn interior_square_neighbor_count() {
        // each interior square at resolution 12 in d=2 touches 8 others
        let all = cover(12, 2);
        let target = GridId { n: 12, coords: vec![3, -2] };
        let count = all
            .iter()
            .filter(|b| adjacent(&target, &b.id).unwrap())
            .count();
        assert_eq!(count, 8);
    }

    #[test]
    fn parent_of_negative_coords() {
        let sub = GridId { n: 12, coords: vec![-7, 5] };
        let p = parent_of(&sub, 3);
        assert_eq!(p, GridId { n: 4, coords: vec![-3, 1] });
    }
}
