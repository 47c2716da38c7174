// Scratch probe for timing individual certifier phases on one function.
use std::sync::Arc;
use std::time::Instant;

use zerocert::certifier::{
    choose_subdivision, exclusion_test, jacobian_floor_test, subsquare_zero_test, CertifierConfig,
    Exclusion, JacobianFloor, SubTest,
};
use zerocert::grid::{boundary_distance, cover, subdivide};
use zerocert::interval::rat;
use zerocert::oracle::{compute_m, modulus_sequence};

fn main() {
    let path = std::env::args().nth(1).unwrap_or("specs/circle_line.json".to_string());
    let n: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(9);
    let name = Arc::new(zerocert::cli::validate_spec(std::path::Path::new(&path)).unwrap());
    let cfg = CertifierConfig { n0: 2, ..Default::default() };

    let t = Instant::now();
    let m_hat = compute_m(&name, cfg.m_precision);
    println!("compute_m: {:?} -> {}", t.elapsed(), m_hat);

    let t = Instant::now();
    let squares = cover(n, name.dim());
    let mut maybes = Vec::new();
    for s in &squares {
        if exclusion_test(&name, s, n, &cfg).unwrap() == Exclusion::Maybe {
            maybes.push(s.clone());
        }
    }
    println!("scan exclusions at n={n}: {:?}, {} maybes", t.elapsed(), maybes.len());

    let clearance = rat(4, n as i64);
    for s in &maybes {
        if boundary_distance(s) < clearance {
            println!("  square {:?} too close to boundary -> restart", s.id);
            return;
        }
    }

    let modulus = modulus_sequence(name.clone());
    let mut actives = Vec::new();
    for s in &maybes {
        let t2 = Instant::now();
        match jacobian_floor_test(&name, s, n, &cfg).unwrap() {
            JacobianFloor::Floor { exponent, lower_bound } => {
                println!(
                    "  floor {:?}: {:?} exponent {} lower {}",
                    s.id,
                    t2.elapsed(),
                    exponent,
                    lower_bound
                );
                actives.push((s.clone(), exponent));
            }
            JacobianFloor::TooSmall => {
                println!("  floor {:?}: TooSmall -> restart", s.id);
                return;
            }
        }
    }

    let mut j_global = 3u64;
    for (_, m) in &actives {
        let r = modulus.r(*m);
        let j = choose_subdivision(n, &r).max(3);
        println!("  r({m}) = {r}, j = {j}");
        j_global = j_global.max(j);
    }
    println!("j_global = {j_global}, n~ = {}", n * j_global);

    let t = Instant::now();
    let mut fired = 0;
    let mut examined = 0;
    for (s, m) in &actives {
        for sub in subdivide(s, j_global) {
            examined += 1;
            let t_sub = Instant::now();
            for l in 1..=cfg.depth_budget {
                let t_l = Instant::now();
                let verdict = subsquare_zero_test(&name, &sub, l, *m, &m_hat, &cfg).unwrap();
                if t_l.elapsed().as_millis() > 300 {
                    println!(
                        "    SLOW sub {:?} l={l}: {:?} -> {}",
                        sub.id,
                        t_l.elapsed(),
                        match &verdict {
                            SubTest::False => "False",
                            SubTest::CandidateZero(_) => "Fired",
                            SubTest::Refine => "Refine",
                        }
                    );
                }
                match verdict {
                    SubTest::False => break,
                    SubTest::CandidateZero(_) => {
                        fired += 1;
                        break;
                    }
                    SubTest::Refine => {}
                }
            }
            if t_sub.elapsed().as_millis() > 500 {
                println!("  slow sub {:?}: {:?}", sub.id, t_sub.elapsed());
            }
            if examined % 100 == 0 {
                println!("  ... {examined} subs, {:?}", t.elapsed());
            }
        }
    }
    println!("sub phase: {:?}, {examined} examined, {fired} fired", t.elapsed());
}
