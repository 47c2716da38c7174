// Micro-probe: time the face-refinement path on the slow candidate.
use std::sync::Arc;
use std::time::Instant;

use zerocert::bnb::refine_min_lower;
use zerocert::interval::{rat, IntervalVector, Rat, RationalInterval};

fn main() {
    let name = Arc::new(
        zerocert::cli::validate_spec(std::path::Path::new("specs/circle_line.json")).unwrap(),
    );
    // lattice point of sub (-115,-113)@225 with q=1
    let point = vec![rat(-229, 450), rat(-225, 450)];
    let theta = rat(3, 450);
    let fx = name
        .eval_enclosure(&IntervalVector::from_point(&point), 25)
        .unwrap();
    let fx_norm = fx.inf_norm();
    println!("fx = [{}, {}]", fx_norm.lo(), fx_norm.hi());
    let faces: Vec<IntervalVector> = (0..2)
        .flat_map(|a| {
            [-1i64, 1].map(|sign| {
                IntervalVector::new(
                    (0..2)
                        .map(|b| {
                            if a == b {
                                RationalInterval::point(&point[a] + &theta * rat(sign, 1))
                            } else {
                                RationalInterval::new(&point[b] - &theta, &point[b] + &theta)
                            }
                        })
                        .collect(),
                )
            })
        })
        .collect();
    let target: Rat = fx_norm.hi() * rat(17, 8);
    println!("target = {target}");
    let mut evals = 0u64;
    let mut eval_time = std::time::Duration::ZERO;
    let t = Instant::now();
    let lower = refine_min_lower(
        &faces,
        |cell, k| {
            evals += 1;
            let t2 = Instant::now();
            let r = name.eval_enclosure(cell, k).unwrap().sub(&fx).inf_norm();
            eval_time += t2.elapsed();
            if evals % 200 == 0 {
                println!(
                    "  {evals} evals, k={k}, width={:.3e}, cumulative eval {:?}",
                    width_f64(&cell.max_width()),
                    eval_time
                );
            }
            r
        },
        &target,
        7,
        800,
    );
    println!(
        "refine: {:?} total, {evals} evals ({:?} in eval), lower = {}",
        t.elapsed(),
        eval_time,
        lower
    );
}

fn width_f64(r: &Rat) -> f64 {
    let n: f64 = r.numer().to_string().parse().unwrap_or(f64::MAX);
    let d: f64 = r.denom().to_string().parse().unwrap_or(1.0);
    n / d
}
