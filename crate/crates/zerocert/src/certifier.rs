//! Certified zero counting over the unit cube.
//!
//! The driver scans a cover of `[-1,1]^d` by squares of side `1/n`, excluding
//! squares whose image provably avoids zero and certifying a Jacobian floor
//! on a `3/n`-neighborhood of the rest. Any square that can neither be
//! excluded nor floored (or sits too close to the boundary) forces a restart
//! of the whole scan at `n+1`. Once the scan settles, the surviving squares
//! are subdivided and each sub-square either gets a certificate that its
//! image avoids zero or produces an inverse-function-theorem ball certifying
//! exactly one zero nearby; adjacent certificates are deduplicated in a fixed
//! global order so each zero is counted once.
//!
//! Every verdict is backed by an exact-arithmetic certificate. The only
//! non-certified outcome is `Inconclusive`, returned when a work budget runs
//! out — which is what happens on inputs that break the promise (a zero on
//! the boundary or with a singular Jacobian).

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::bnb::{refine_min_lower, soft_min, MinDecision};
use crate::grid::{
    adjacent, boundary_distance, cover, inflated_box, parent_of, subdivide, GridBox, GridId,
};
use crate::interval::{exponent_below, pow2, rat, IntervalVector, Rat, RationalInterval};
use crate::oracle::{compute_m, modulus_sequence, C1Name, ModulusSequence};

const EXCLUSION_ROUNDS: u32 = 4_000;
const FLOOR_ROUNDS: u32 = 12_000;
const SUB_EXCLUSION_ROUNDS: u32 = 1_500;
const FACE_ROUNDS: u32 = 800;
const SUBSQUARE_CAP: usize = 400_000;
const LATTICE_CAP: u64 = 400_000;

/// Tunable limits for one certification run.
#[derive(Clone, Debug)]
pub struct CertifierConfig {
    /// Requested accuracy: certified regions have diameter at most `1/n0`.
    pub n0: u64,
    /// Maximum number of resolution increments before giving up.
    pub restart_budget: u32,
    /// Maximum refinement depth per sub-square.
    pub depth_budget: u32,
    /// The global derivative bound is computed to within `2^-m_precision`.
    pub m_precision: u32,
    /// Worker threads; 0 uses the rayon default, 1 runs inline.
    pub threads: usize,
    /// Optional outward rounding of enclosures to dyadics of this precision.
    pub dyadic_precision: Option<u32>,
}

impl Default for CertifierConfig {
    fn default() -> Self {
        Self {
            n0: 1,
            restart_budget: 40,
            depth_budget: 48,
            m_precision: 6,
            threads: 0,
            dyadic_precision: None,
        }
    }
}

/// Work budget ran out before a certificate was reached.
#[derive(Clone, Debug)]
pub struct BudgetExhausted(pub String);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Certified,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exclusion {
    /// Certifies the image of the square stays away from zero.
    NoZero,
    /// Certifies the image comes within `2^{-(n-1)}` of zero.
    Maybe,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JacobianFloor {
    /// Certifies `min { ||Df||, |det Df| } > 2^-exponent` on the enlarged
    /// neighborhood; `lower_bound` is the certified bound itself.
    Floor { exponent: u32, lower_bound: Rat },
    /// Certifies the minimum is at most `2^{-n+1}`, forcing a restart.
    TooSmall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareResult {
    Undefined,
    True,
    False,
}

/// Per-square record of the subdivision phase.
#[derive(Clone, Debug)]
pub struct SquareStatus {
    pub square: GridBox,
    pub result: SquareResult,
    pub counter: u64,
    /// Certified sub-squares with their neighborhood blocks.
    pub certified_subsquares: Vec<(GridId, Vec<GridBox>)>,
    pub floor_exponent: u32,
    pub floor_lower_bound: Rat,
}

/// Ball certificate produced by the sub-square test: the image ball around
/// `f(point)` of radius `d_lower/2` contains zero, which pins exactly one
/// zero of `f` inside the neighborhood block of the sub-square.
#[derive(Clone, Debug)]
pub struct CandidateWitness {
    pub point: Vec<Rat>,
    pub theta: Rat,
    pub d_lower: Rat,
    pub f_upper: Rat,
    pub depth: u32,
}

/// Verdict of one sub-square test at refinement depth `l`.
#[derive(Clone, Debug)]
pub enum SubTest {
    False,
    CandidateZero(CandidateWitness),
    Refine,
}

/// One certified region: the neighborhood block of a certified sub-square,
/// containing exactly one zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub anchor: GridId,
    pub boxes: Vec<GridBox>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RestartReason {
    BoundaryClearance,
    JacobianFloor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestartEvent {
    pub n: u64,
    pub reason: RestartReason,
}

/// Deterministic run log, summarized.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceSummary {
    pub restarts: Vec<RestartEvent>,
    pub excluded_squares: u64,
    pub active_parents: u64,
    pub subdivision_factor: Option<u64>,
    pub fine_resolution: Option<u64>,
    pub subsquares_examined: u64,
    pub candidates_fired: u64,
    pub deduplicated: u64,
    pub exhausted: Option<String>,
}

/// Final report of a certification run.
#[derive(Clone, Debug)]
pub struct ZeroReport {
    pub outcome: Outcome,
    pub n: u64,
    pub count: u64,
    pub regions: Vec<Region>,
    pub trace: TraceSummary,
}

fn rounded(iv: RationalInterval, cfg: &CertifierConfig) -> RationalInterval {
    match cfg.dyadic_precision {
        Some(p) => iv.round_out(p),
        None => iv,
    }
}

/// Decide whether the image of `square` certifiably avoids zero at scale
/// `2^-n` (distance of the image from zero, soft-compared against the scale).
pub fn exclusion_test(
    name: &C1Name,
    square: &GridBox,
    n: u64,
    cfg: &CertifierConfig,
) -> Result<Exclusion, BudgetExhausted> {
    let theta_above = pow2(-(n as i32));
    let theta_below = pow2(-(n as i32) + 1);
    let region = [square.to_interval_vector()];
    let g = |cell: &IntervalVector, k: u32| {
        rounded(
            name.eval_enclosure(cell, k)
                .expect("scan squares lie inside the domain")
                .inf_norm(),
            cfg,
        )
    };
    match soft_min(
        &region,
        g,
        &theta_above,
        &theta_below,
        n as u32 + 3,
        false,
        EXCLUSION_ROUNDS,
    ) {
        Ok(MinDecision::Above(_)) => Ok(Exclusion::NoZero),
        Ok(MinDecision::Below) => Ok(Exclusion::Maybe),
        Err(_) => Err(BudgetExhausted(format!(
            "image-distance decision stalled on square {:?} at n={n}",
            square.id
        ))),
    }
}

/// Decide whether `min { ||Df||, |det Df| }` on the `3/n`-neighborhood of the
/// square certifiably exceeds `2^-n`. On success the certified bound is
/// sharpened so the returned exponent is close to the true floor, which keeps
/// later subdivisions coarse.
pub fn jacobian_floor_test(
    name: &C1Name,
    square: &GridBox,
    n: u64,
    cfg: &CertifierConfig,
) -> Result<JacobianFloor, BudgetExhausted> {
    assert!(
        boundary_distance(square) >= rat(4, square.n() as i64),
        "floor test requires 4/n clearance"
    );
    let theta_above = pow2(-(n as i32));
    let theta_below = pow2(-(n as i32) + 1);
    let region = [inflated_box(square, 3)];
    let g = |cell: &IntervalVector, k: u32| {
        let j = name
            .jac_enclosure(cell, k)
            .expect("neighborhood lies inside the domain");
        rounded(j.inf_norm().min_with(&j.det().abs()), cfg)
    };
    match soft_min(
        &region,
        g,
        &theta_above,
        &theta_below,
        n as u32 + 3,
        true,
        FLOOR_ROUNDS,
    ) {
        Ok(MinDecision::Above(lower_bound)) => {
            let exponent = exponent_below(&lower_bound, 1)
                .expect("certified floor bound is positive");
            Ok(JacobianFloor::Floor { exponent, lower_bound })
        }
        Ok(MinDecision::Below) => Ok(JacobianFloor::TooSmall),
        Err(_) => Err(BudgetExhausted(format!(
            "Jacobian floor decision stalled on square {:?} at n={n}",
            square.id
        ))),
    }
}

/// Smallest subdivision factor `j` such that the `3/(jn)`-neighborhood of a
/// sub-square of side `1/(jn)` fits in an open ball of radius `r` around its
/// center, i.e. `7/(2jn) < r`.
pub fn choose_subdivision(n: u64, r: &Rat) -> u64 {
    assert!(r.is_positive());
    let bound = rat(7, 2) / (Rat::from_integer(BigInt::from(n)) * r);
    let j = bound.floor().to_integer() + BigInt::from(1);
    j.to_u64().unwrap_or(u64::MAX)
}

/// One depth-`l` attempt on a sub-square: certify the image avoids zero, or
/// produce a ball certificate for a zero, or report that neither certificate
/// is reachable at this depth.
pub fn subsquare_zero_test(
    name: &C1Name,
    sub: &GridBox,
    l: u32,
    floor_exponent: u32,
    m_hat: &Rat,
    cfg: &CertifierConfig,
) -> Result<SubTest, BudgetExhausted> {
    let region = [sub.to_interval_vector()];
    let g = |cell: &IntervalVector, k: u32| {
        rounded(
            name.eval_enclosure(cell, k)
                .expect("sub-squares lie inside the domain")
                .inf_norm(),
            cfg,
        )
    };
    let theta_above = pow2(-(l as i32));
    let theta_below = pow2(-(l as i32) + 1);
    match soft_min(
        &region,
        g,
        &theta_above,
        &theta_below,
        l + 3,
        false,
        SUB_EXCLUSION_ROUNDS,
    ) {
        Ok(MinDecision::Above(_)) => return Ok(SubTest::False),
        Ok(MinDecision::Below) => {}
        Err(_) => {
            return Err(BudgetExhausted(format!(
                "sub-square image decision stalled on {:?} at l={l}",
                sub.id
            )))
        }
    }
    lattice_fire(name, sub, l, floor_exponent, m_hat, cfg)
}

/// Cover the sub-square with a rational lattice fine enough that any zero has
/// a lattice point within `2^{-l-1}/(4M)` of it, then hunt for a point whose
/// image is certifiably closer to zero than half the certified drop of `f`
/// on the boundary of the largest interior ball around that point.
fn lattice_fire(
    name: &C1Name,
    sub: &GridBox,
    l: u32,
    floor_exponent: u32,
    m_hat: &Rat,
    cfg: &CertifierConfig,
) -> Result<SubTest, BudgetExhausted> {
    let d = name.dim();
    let nn = sub.n();
    let side = sub.side();
    // cells per axis: ceil(4 M 2^l / nn) puts cell centers within the cover radius
    let q_rat = rat(4, 1) * m_hat * pow2(l as i32) / Rat::from_integer(BigInt::from(nn));
    let q = q_rat
        .ceil()
        .to_integer()
        .to_u64()
        .unwrap_or(u64::MAX)
        .max(1);
    let total = q.checked_pow(d as u32).unwrap_or(u64::MAX);
    if total > LATTICE_CAP {
        return Err(BudgetExhausted(format!(
            "lattice of {total} points exceeds cap on {:?} at l={l}",
            sub.id
        )));
    }
    let step = &side / Rat::from_integer(BigInt::from(q));
    let half_step = &step / Rat::from_integer(BigInt::from(2));
    let lows: Vec<Rat> = (0..d)
        .map(|a| sub.axis_range(a).lo().clone())
        .collect();
    // neighborhood box of the sub-square, for exact boundary distances
    let nbox = inflated_box(sub, 1);
    let k_quick = l + 4;

    struct Candidate {
        point: Vec<Rat>,
        theta: Rat,
        upper: Rat,
        index: u64,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut idx = vec![0u64; d];
    let mut flat = 0u64;
    loop {
        let point: Vec<Rat> = (0..d)
            .map(|a| &lows[a] + &step * Rat::from_integer(BigInt::from(idx[a])) + &half_step)
            .collect();
        let theta = (0..d)
            .map(|a| {
                let r = nbox.component(a);
                let left = &point[a] - r.lo();
                let right = r.hi() - &point[a];
                if left < right { left } else { right }
            })
            .min()
            .expect("d >= 1");
        let enc = rounded(
            name.eval_enclosure(&IntervalVector::from_point(&point), k_quick)
                .expect("lattice points lie inside the domain")
                .inf_norm(),
            cfg,
        );
        // a fire needs ||f(x_i)|| < d_i/2 <= M theta / 2; prune the hopeless
        let cap = m_hat * &theta / Rat::from_integer(BigInt::from(2));
        if *enc.lo() < cap {
            candidates.push(Candidate {
                point,
                theta,
                upper: enc.hi().clone(),
                index: flat,
            });
        }
        // odometer
        let mut axis = d;
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < q {
                break;
            }
            idx[axis] = 0;
        }
        flat += 1;
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    candidates.sort_by(|a, b| a.upper.cmp(&b.upper).then(a.index.cmp(&b.index)));

    let tau_scale = pow2(-(floor_exponent as i32) - 1);
    let k_fine = l + 24;
    for cand in &candidates {
        let tau = &tau_scale * &cand.theta;
        let fx = name
            .eval_enclosure(&IntervalVector::from_point(&cand.point), k_fine)
            .expect("lattice points lie inside the domain");
        let fx_norm = rounded(fx.inf_norm(), cfg);
        // a fire needs 2 ||f(x_i)|| < d_i, and d_i <= M theta by the global
        // derivative bound, so points this far out cannot fire at any depth
        if fx_norm.lo() + fx_norm.lo() >= m_hat * &cand.theta {
            continue;
        }
        // aim a little past twice the image bound so the strict comparison
        // has room
        let mut target = (fx_norm.hi() + fx_norm.hi()) * rat(17, 16);
        if target < tau {
            target = tau.clone();
        }
        let faces = ball_faces(&cand.point, &cand.theta);
        let g_diff = |cell: &IntervalVector, k: u32| {
            rounded(
                name.eval_enclosure(cell, k)
                    .expect("faces lie inside the domain")
                    .sub(&fx)
                    .inf_norm(),
                cfg,
            )
        };
        let d_lower = refine_min_lower(&faces, g_diff, &target, l + 6, FACE_ROUNDS);
        if d_lower < tau {
            continue;
        }
        // certify ||f(x_i)|| < d_lower / 2, escalating the approximant index
        let mut k = k_fine;
        let mut lower = fx_norm.lo().clone();
        let mut upper = fx_norm.hi().clone();
        for _ in 0..4 {
            if &upper + &upper < d_lower {
                return Ok(SubTest::CandidateZero(CandidateWitness {
                    point: cand.point.clone(),
                    theta: cand.theta.clone(),
                    d_lower,
                    f_upper: upper,
                    depth: l,
                }));
            }
            if &lower + &lower >= d_lower {
                break; // image provably too far out for this ball
            }
            k += 12;
            let enc = rounded(
                name.eval_enclosure(&IntervalVector::from_point(&cand.point), k)
                    .expect("lattice points lie inside the domain")
                    .inf_norm(),
                cfg,
            );
            lower = enc.lo().clone();
            upper = enc.hi().clone();
        }
    }
    Ok(SubTest::Refine)
}

/// The `2d` faces of the closed max-norm ball around `center` with the given
/// radius, as degenerate boxes.
fn ball_faces(center: &[Rat], radius: &Rat) -> Vec<IntervalVector> {
    let d = center.len();
    let mut faces = Vec::with_capacity(2 * d);
    for a in 0..d {
        for sign in [-1i64, 1] {
            let comps: Vec<RationalInterval> = (0..d)
                .map(|b| {
                    if a == b {
                        let v = &center[a] + radius * rat(sign, 1);
                        RationalInterval::point(v)
                    } else {
                        RationalInterval::new(&center[b] - radius, &center[b] + radius)
                    }
                })
                .collect();
            faces.push(IntervalVector::new(comps));
        }
    }
    faces
}

/// Deduplicate fired sub-squares in the given (already sorted) order: a
/// candidate is kept unless some adjacent sub-square was already kept,
/// including across parent squares.
pub fn dedup_in_order(fired: &[GridId]) -> Vec<bool> {
    let mut kept: HashSet<GridId> = HashSet::new();
    let mut out = Vec::with_capacity(fired.len());
    for id in fired {
        let suppressed = kept
            .iter()
            .any(|other| adjacent(id, other).unwrap_or(false));
        if suppressed {
            out.push(false);
        } else {
            kept.insert(id.clone());
            out.push(true);
        }
    }
    out
}

/// Total count and region list from the per-square statuses.
pub fn assemble(statuses: &[SquareStatus]) -> (u64, Vec<Region>) {
    let count = statuses.iter().map(|s| s.counter).sum();
    let mut regions: Vec<Region> = statuses
        .iter()
        .flat_map(|s| {
            s.certified_subsquares.iter().map(|(id, boxes)| Region {
                anchor: id.clone(),
                boxes: boxes.clone(),
            })
        })
        .collect();
    regions.sort_by(|a, b| a.anchor.cmp(&b.anchor));
    (count, regions)
}

struct ActiveParent {
    square: GridBox,
    floor_exponent: u32,
    floor_lower_bound: Rat,
}

enum ScanOutcome {
    Restart(RestartReason),
    Settled(Vec<ActiveParent>),
}

fn scan(
    name: &C1Name,
    n: u64,
    cfg: &CertifierConfig,
    trace: &mut TraceSummary,
) -> Result<ScanOutcome, BudgetExhausted> {
    let squares = cover(n, name.dim());
    let exclusions: Vec<Result<Exclusion, BudgetExhausted>> = run_parallel(cfg, &squares, |s| {
        exclusion_test(name, s, n, cfg)
    });
    let mut maybes: Vec<&GridBox> = Vec::new();
    let mut excluded = 0u64;
    for (s, e) in squares.iter().zip(exclusions) {
        match e? {
            Exclusion::NoZero => excluded += 1,
            Exclusion::Maybe => maybes.push(s),
        }
    }
    trace.excluded_squares = excluded;
    let clearance = rat(4, n as i64);
    for s in &maybes {
        if boundary_distance(s) < clearance {
            return Ok(ScanOutcome::Restart(RestartReason::BoundaryClearance));
        }
    }
    let floors: Vec<Result<JacobianFloor, BudgetExhausted>> = run_parallel(cfg, &maybes, |s| {
        jacobian_floor_test(name, s, n, cfg)
    });
    let mut actives = Vec::new();
    for (s, fl) in maybes.iter().zip(floors) {
        match fl? {
            JacobianFloor::TooSmall => {
                return Ok(ScanOutcome::Restart(RestartReason::JacobianFloor));
            }
            JacobianFloor::Floor { exponent, lower_bound } => actives.push(ActiveParent {
                square: (*s).clone(),
                floor_exponent: exponent,
                floor_lower_bound: lower_bound,
            }),
        }
    }
    Ok(ScanOutcome::Settled(actives))
}

enum SubOutcome {
    False,
    Fired(CandidateWitness),
}

fn localize(
    name: &C1Name,
    n: u64,
    actives: Vec<ActiveParent>,
    m_hat: &Rat,
    modulus: &ModulusSequence,
    cfg: &CertifierConfig,
    trace: &mut TraceSummary,
) -> Result<(u64, Vec<Region>, Vec<SquareStatus>), BudgetExhausted> {
    // One global subdivision factor: the finest any parent requires, and at
    // least 3 so every certified region has diameter at most 1/n.
    let mut j_global = 3u64;
    for a in &actives {
        let r = modulus.r(a.floor_exponent);
        let j = choose_subdivision(n, &r).max(3);
        if j > j_global {
            j_global = j;
        }
    }
    let nn = n.checked_mul(j_global).ok_or_else(|| {
        BudgetExhausted("subdivision factor overflow".to_string())
    })?;
    trace.subdivision_factor = Some(j_global);
    trace.fine_resolution = Some(nn);

    let mut subs: Vec<(GridBox, u32)> = Vec::new();
    for a in &actives {
        for sub in subdivide(&a.square, j_global) {
            subs.push((sub, a.floor_exponent));
        }
    }
    if subs.len() > SUBSQUARE_CAP {
        return Err(BudgetExhausted(format!(
            "{} sub-squares exceed the examination cap",
            subs.len()
        )));
    }
    subs.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    trace.subsquares_examined = subs.len() as u64;

    let verdicts: Vec<Result<SubOutcome, BudgetExhausted>> =
        run_parallel(cfg, &subs, |(sub, floor_m)| {
            sub_verdict(name, sub, *floor_m, m_hat, cfg)
        });

    // Sequential commit in the fixed global order.
    let mut fired_ids: Vec<GridId> = Vec::new();
    let mut fired_info: Vec<(usize, CandidateWitness)> = Vec::new();
    for (i, ((sub, _), v)) in subs.iter().zip(verdicts).enumerate() {
        match v? {
            SubOutcome::False => {}
            SubOutcome::Fired(w) => {
                fired_ids.push(sub.id.clone());
                fired_info.push((i, w));
            }
        }
    }
    trace.candidates_fired = fired_ids.len() as u64;
    let keep = dedup_in_order(&fired_ids);
    trace.deduplicated = keep.iter().filter(|k| !**k).count() as u64;

    let mut statuses: BTreeMap<GridId, SquareStatus> = actives
        .into_iter()
        .map(|a| {
            (
                a.square.id.clone(),
                SquareStatus {
                    square: a.square,
                    result: SquareResult::Undefined,
                    counter: 0,
                    certified_subsquares: Vec::new(),
                    floor_exponent: a.floor_exponent,
                    floor_lower_bound: a.floor_lower_bound,
                },
            )
        })
        .collect();
    for (((i, _w), id), kept) in fired_info.iter().zip(&fired_ids).zip(&keep) {
        if !kept {
            continue;
        }
        let sub = &subs[*i].0;
        let (near, _) = crate::grid::neighborhoods(sub);
        let parent = parent_of(id, j_global);
        let status = statuses.get_mut(&parent).expect("fired sub has a parent");
        status.counter += 1;
        status.certified_subsquares.push((id.clone(), near));
    }
    for status in statuses.values_mut() {
        status.result = if status.counter >= 1 {
            SquareResult::True
        } else {
            SquareResult::False
        };
    }
    let statuses: Vec<SquareStatus> = statuses.into_values().collect();
    let (count, regions) = assemble(&statuses);
    Ok((count, regions, statuses))
}

fn sub_verdict(
    name: &C1Name,
    sub: &GridBox,
    floor_exponent: u32,
    m_hat: &Rat,
    cfg: &CertifierConfig,
) -> Result<SubOutcome, BudgetExhausted> {
    // One cheap enclosure often certifies the image is far from zero; the
    // certificate it yields is the same one the depth loop would reach later.
    let quick = rounded(
        name.eval_enclosure(&sub.to_interval_vector(), floor_exponent + 8)
            .expect("sub-squares lie inside the domain")
            .inf_norm(),
        cfg,
    );
    if quick.lo().is_positive() {
        if let Some(l0) = exponent_below(quick.lo(), 1) {
            if l0 <= cfg.depth_budget {
                return Ok(SubOutcome::False);
            }
        }
    }
    for l in 1..=cfg.depth_budget {
        match subsquare_zero_test(name, sub, l, floor_exponent, m_hat, cfg)? {
            SubTest::False => return Ok(SubOutcome::False),
            SubTest::CandidateZero(w) => return Ok(SubOutcome::Fired(w)),
            SubTest::Refine => {}
        }
    }
    Err(BudgetExhausted(format!(
        "depth budget exhausted on sub-square {:?}",
        sub.id
    )))
}

/// Map a slice in parallel (or inline for `threads == 1`), preserving order.
fn run_parallel<T, U, F>(cfg: &CertifierConfig, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if cfg.threads == 1 {
        return items.iter().map(f).collect();
    }
    if cfg.threads == 0 {
        return items.par_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .expect("thread pool construction");
    pool.install(|| items.par_iter().map(f).collect())
}

/// Run the full certification. On `Certified`, the count is exact, every
/// region contains exactly one zero, every zero lies in some region, and the
/// Hausdorff distance between the zero set and the union of the regions is at
/// most `1/n` for the reported `n >= 3 n0`. On `Inconclusive` no claim is
/// made. Deterministic for a fixed function name and configuration.
pub fn certify(name: &Arc<C1Name>, cfg: &CertifierConfig) -> ZeroReport {
    assert!(cfg.n0 >= 1, "accuracy parameter must be at least 1");
    assert!(cfg.restart_budget >= 1 && cfg.depth_budget >= 1);
    let m_hat = compute_m(name, cfg.m_precision);
    let modulus = modulus_sequence(name.clone());
    let mut trace = TraceSummary::default();
    let mut n = 3 * cfg.n0;
    let mut increments = 0u32;
    loop {
        match scan(name, n, cfg, &mut trace) {
            Err(b) => return inconclusive(n, trace, b.0),
            Ok(ScanOutcome::Restart(reason)) => {
                trace.restarts.push(RestartEvent { n, reason });
                if increments >= cfg.restart_budget {
                    return inconclusive(n, trace, "restart budget exhausted".to_string());
                }
                increments += 1;
                n += 1;
            }
            Ok(ScanOutcome::Settled(actives)) => {
                trace.active_parents = actives.len() as u64;
                if actives.is_empty() {
                    return ZeroReport {
                        outcome: Outcome::Certified,
                        n,
                        count: 0,
                        regions: Vec::new(),
                        trace,
                    };
                }
                return match localize(name, n, actives, &m_hat, &modulus, cfg, &mut trace) {
                    Err(b) => inconclusive(n, trace, b.0),
                    Ok((count, regions, _statuses)) => ZeroReport {
                        outcome: Outcome::Certified,
                        n,
                        count,
                        regions,
                        trace,
                    },
                };
            }
        }
    }
}

fn inconclusive(n: u64, mut trace: TraceSummary, why: String) -> ZeroReport {
    trace.exhausted = Some(why);
    ZeroReport {
        outcome: Outcome::Inconclusive,
        n,
        count: 0,
        regions: Vec::new(),
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;

    fn name_of(components: Vec<MultiPoly>) -> Arc<C1Name> {
        Arc::new(C1Name::exact_polynomial(components, rat(1, 4)))
    }

    fn identity2() -> Arc<C1Name> {
        name_of(vec![MultiPoly::var(2, 0), MultiPoly::var(2, 1)])
    }

    fn quadratic1() -> Arc<C1Name> {
        name_of(vec![MultiPoly::from_terms(
            1,
            vec![(vec![2], rat(1, 1)), (vec![0], rat(-1, 4))],
        )])
    }

    fn shifted1() -> Arc<C1Name> {
        // f(x) = x - 3, never zero on the cube
        name_of(vec![MultiPoly::from_terms(
            1,
            vec![(vec![1], rat(1, 1)), (vec![0], rat(-3, 1))],
        )])
    }

    #[test]
    fn exclusion_far_function() {
        let cfg = CertifierConfig::default();
        let f = name_of(vec![
            MultiPoly::from_terms(2, vec![(vec![1, 0], rat(1, 1)), (vec![0, 0], rat(-3, 1))]),
            MultiPoly::var(2, 1),
        ]);
        for s in cover(3, 2) {
            assert_eq!(exclusion_test(&f, &s, 3, &cfg).unwrap(), Exclusion::NoZero);
        }
    }

    #[test]
    fn exclusion_square_with_zero() {
        let cfg = CertifierConfig::default();
        let f = identity2();
        let s = GridBox::new(6, vec![0, 0]);
        assert_eq!(exclusion_test(&f, &s, 6, &cfg).unwrap(), Exclusion::Maybe);
    }

    #[test]
    fn exclusion_quadratic_cases() {
        let cfg = CertifierConfig::default();
        let f = quadratic1();
        // [-1/8, 1/8]: min |x^2-1/4| = 15/64 > 2^-n once n is large enough
        let s = GridBox::new(8, vec![-1]);
        assert_eq!(exclusion_test(&f, &s, 8, &cfg).unwrap(), Exclusion::NoZero);
        // square containing the root 1/2
        let s2 = GridBox::new(8, vec![3]); // [3/8, 1/2]
        assert_eq!(exclusion_test(&f, &s2, 8, &cfg).unwrap(), Exclusion::Maybe);
    }

    #[test]
    fn floor_identity_passes() {
        let cfg = CertifierConfig::default();
        let f = identity2();
        let s = GridBox::new(6, vec![0, 0]);
        match jacobian_floor_test(&f, &s, 6, &cfg).unwrap() {
            JacobianFloor::Floor { exponent, lower_bound } => {
                assert_eq!(exponent, 1);
                assert!(lower_bound > rat(1, 2));
                assert!(lower_bound <= rat(1, 1));
            }
            JacobianFloor::TooSmall => panic!("identity has unit floor"),
        }
    }

    #[test]
    fn floor_degenerate_restarts() {
        // f(x) = x^2: derivative vanishes at 0, so any neighborhood of 0 fails
        let cfg = CertifierConfig::default();
        let f = name_of(vec![MultiPoly::from_terms(1, vec![(vec![2], rat(1, 1))])]);
        let s = GridBox::new(6, vec![0]);
        assert_eq!(
            jacobian_floor_test(&f, &s, 6, &cfg).unwrap(),
            JacobianFloor::TooSmall
        );
    }

    #[test]
    fn choose_subdivision_examples() {
        assert_eq!(choose_subdivision(6, &rat(1, 1)), 1); // 7/12 < 1
        assert_eq!(choose_subdivision(6, &rat(1, 8)), 5); // smallest j with 7/(12j) < 1/8
        // smaller radius never yields a smaller factor
        let mut prev = 0;
        for denom in 1..40 {
            let j = choose_subdivision(6, &rat(1, denom));
            assert!(j >= prev);
            prev = j;
        }
    }

    #[test]
    fn subsquare_excludes_far_box() {
        let cfg = CertifierConfig::default();
        let f = identity2();
        let m_hat = compute_m(&f, 6);
        // sub-square at distance 1/4 from the origin: certifiably no zero
        // once 2^-l < 1/4
        let sub = GridBox::new(12, vec![3, 3]); // [1/4, 1/3]^2
        match subsquare_zero_test(&f, &sub, 3, 1, &m_hat, &cfg).unwrap() {
            SubTest::False => {}
            other => panic!("expected False, got {other:?}"),
        }
    }

    #[test]
    fn subsquare_fires_on_zero() {
        let cfg = CertifierConfig::default();
        let f = identity2();
        let m_hat = compute_m(&f, 6);
        // origin is a corner of this sub-square
        let sub = GridBox::new(30, vec![-1, -1]);
        let mut fired = false;
        for l in 1..=10 {
            match subsquare_zero_test(&f, &sub, l, 1, &m_hat, &cfg).unwrap() {
                SubTest::CandidateZero(w) => {
                    fired = true;
                    // the certified ball radius floor: d >= 2^{-m-1} theta
                    assert!(w.d_lower >= pow2(-2) * &w.theta);
                    assert!(&w.f_upper + &w.f_upper < w.d_lower);
                    assert!(w.theta >= rat(1, 30));
                    break;
                }
                SubTest::False => panic!("sub-square contains the zero"),
                SubTest::Refine => {}
            }
        }
        assert!(fired, "ball certificate should fire within depth 10");
    }

    #[test]
    fn dedup_order_and_corners() {
        // isolated candidate stays
        let a = GridId { n: 30, coords: vec![5, 5] };
        assert_eq!(dedup_in_order(&[a.clone()]), vec![true]);
        // two adjacent candidates: first kept, second suppressed
        let b = GridId { n: 30, coords: vec![5, 6] };
        assert_eq!(dedup_in_order(&[a.clone(), b.clone()]), vec![true, false]);
        // four squares sharing a corner: exactly one survives
        let corner = [
            GridId { n: 30, coords: vec![-1, -1] },
            GridId { n: 30, coords: vec![-1, 0] },
            GridId { n: 30, coords: vec![0, -1] },
            GridId { n: 30, coords: vec![0, 0] },
        ];
        let kept = dedup_in_order(&corner);
        assert_eq!(kept.iter().filter(|k| **k).count(), 1);
        assert_eq!(kept[0], true);
        // far-apart candidates both stay
        let c = GridId { n: 30, coords: vec![9, 9] };
        assert_eq!(dedup_in_order(&[a, c]), vec![true, true]);
    }

    #[test]
    fn certify_identity_single_zero() {
        let cfg = CertifierConfig { n0: 2, ..Default::default() };
        let report = certify(&identity2(), &cfg);
        assert_eq!(report.outcome, Outcome::Certified);
        assert_eq!(report.count, 1);
        assert_eq!(report.regions.len(), 1);
        assert!(report.n >= 6);
        let origin = vec![rat(0, 1), rat(0, 1)];
        assert!(report.regions[0].boxes.iter().any(|b| b.contains_point(&origin)));
    }

    #[test]
    fn certify_zero_free_field() {
        let cfg = CertifierConfig { n0: 1, ..Default::default() };
        let f = name_of(vec![
            MultiPoly::from_terms(2, vec![(vec![1, 0], rat(1, 1)), (vec![0, 0], rat(-3, 1))]),
            MultiPoly::var(2, 1),
        ]);
        let report = certify(&f, &cfg);
        assert_eq!(report.outcome, Outcome::Certified);
        assert_eq!(report.count, 0);
        assert!(report.regions.is_empty());
    }

    #[test]
    fn certify_two_roots_quadratic() {
        let cfg = CertifierConfig { n0: 4, ..Default::default() };
        let report = certify(&quadratic1(), &cfg);
        assert_eq!(report.outcome, Outcome::Certified);
        assert_eq!(report.count, 2);
        assert_eq!(report.regions.len(), 2);
        let half = vec![rat(1, 2)];
        let neg_half = vec![rat(-1, 2)];
        let covers = |p: &Vec<Rat>| {
            report
                .regions
                .iter()
                .any(|r| r.boxes.iter().any(|b| b.contains_point(p)))
        };
        assert!(covers(&half));
        assert!(covers(&neg_half));
    }

    #[test]
    fn certify_promise_violation_is_inconclusive() {
        // f(x) = x^2 has a zero with vanishing derivative: never certified
        let cfg = CertifierConfig {
            n0: 4,
            restart_budget: 6,
            ..Default::default()
        };
        let f = name_of(vec![MultiPoly::from_terms(1, vec![(vec![2], rat(1, 1))])]);
        let report = certify(&f, &cfg);
        assert_eq!(report.outcome, Outcome::Inconclusive);
        assert!(report.trace.exhausted.is_some());
    }

    #[test]
    fn certify_shifted_all_excluded_fast() {
        let cfg = CertifierConfig { n0: 1, ..Default::default() };
        let report = certify(&shifted1(), &cfg);
        assert_eq!(report.outcome, Outcome::Certified);
        assert_eq!(report.count, 0);
        assert_eq!(report.trace.excluded_squares, 6); // all 2n squares at n=3
    }

    #[test]
    fn restart_sequence_is_increasing() {
        // roots at +-1/2 sit on square boundaries for small n, forcing
        // boundary-clearance restarts before the scan settles
        let cfg = CertifierConfig { n0: 2, ..Default::default() };
        let report = certify(&quadratic1(), &cfg);
        assert_eq!(report.outcome, Outcome::Certified);
        let ns: Vec<u64> = report.trace.restarts.iter().map(|r| r.n).collect();
        for w in ns.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(report.n >= 6);
    }
}
