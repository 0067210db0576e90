//! Acceptance gate: every criterion runs at its stated size and tolerance
//! and prints one PASS/FAIL line. Exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{check_hull_properties, field, grassmann, kneser};
use p3hull::hull::VertexSet;
use p3hull::qcomb::{count_a, kneser_degree, kneser_edge_count};
use p3hull::verify::{
    verify_case2count, verify_chain, verify_lemma22, verify_lemma23, verify_lemma24, verify_lemma24_construction,
    verify_thm11, verify_thm12, CheckReport, Sampling,
};
use p3hull::{enumerate_subspaces, gaussian_binomial, CountParams};

const SEED: u64 = 20_240_901;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn collect(reports: Vec<CheckReport>) -> Outcome {
    let checked: u64 = reports.iter().map(|r| r.checked).sum();
    match reports.iter().find(|r| !r.passed) {
        Some(r) => Err(format!("{} {}: {} {:?}", r.target, r.params, r.detail, r.counterexample)),
        None => Ok(format!("{} checks, {checked} comparisons", reports.len())),
    }
}

fn counting_identities() -> Outcome {
    let mut instances = 0;
    for q in [2u64, 3, 4, 5] {
        for n in 1..=8u32 {
            for k in 1..=n {
                let total = gaussian_binomial(n, k, q);
                if total > BigUint::from(200_000u32) {
                    continue;
                }
                instances += 1;
                let listed = enumerate_subspaces(n as usize, k as usize, &field(q)).map_err(|e| e.to_string())?;
                if BigUint::from(listed.len()) != total {
                    return Err(format!("q={q} n={n} k={k}: enumerated {}, expected {total}", listed.len()));
                }
                for m in 0..=n {
                    let sum: BigUint = (0..=k).map(|i| count_a(&CountParams::new(n, m, k, i, 0, q))).sum();
                    if sum != total {
                        return Err(format!("q={q} n={n} k={k} m={m}: partition sums to {sum}"));
                    }
                }
            }
        }
    }
    Ok(format!("{instances} (q, n, k) instances"))
}

fn regularity() -> Outcome {
    for (q, n, k) in [(2, 4, 2), (2, 5, 2), (2, 6, 2), (3, 4, 2), (3, 5, 2), (2, 6, 3)] {
        let g = kneser(q, n, k);
        let r = g.degree_report();
        let degree = kneser_degree(n as u32, k as u32, q);
        let edges = kneser_edge_count(n as u32, k as u32, q);
        if r.degree.map(BigUint::from) != Some(degree.clone()) || BigUint::from(r.edge_count) != edges {
            return Err(format!("K_{q}({n},{k}): report {r:?}, expected degree {degree}, {edges} edges"));
        }
    }
    Ok("6 graphs regular with the closed-form degree and edge count".into())
}

fn lemma23() -> Outcome {
    let mut reports = Vec::new();
    for (q, n, k) in [(2, 4, 2), (2, 5, 2), (3, 4, 2), (2, 6, 3)] {
        reports.push(verify_lemma23(&kneser(q, n, k), None).map_err(|e| e.to_string())?);
    }
    collect(reports)
}

fn lemma22() -> Outcome {
    let mut reports = Vec::new();
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        for k in 2..=6usize {
            for n in 2 * k + 1..=14 {
                reports.push(verify_lemma22(q, n, k).map_err(|e| e.to_string())?);
            }
        }
    }
    collect(reports)
}

fn seeded(samples: usize) -> Sampling {
    Sampling::Seeded { samples, seed: SEED }
}

fn require_samples(r: &CheckReport, at_least: u64) -> Result<(), String> {
    if r.checked < at_least {
        return Err(format!("{} {}: only {} samples", r.target, r.params, r.checked));
    }
    Ok(())
}

fn case2_count() -> Outcome {
    let e = |e: p3hull::Error| e.to_string();
    let sampled = verify_case2count(&kneser(2, 6, 3), seeded(1000)).map_err(e)?;
    require_samples(&sampled, 1000)?;
    collect(vec![
        verify_case2count(&kneser(2, 4, 2), Sampling::Exhaustive).map_err(e)?,
        verify_case2count(&kneser(3, 4, 2), Sampling::Exhaustive).map_err(e)?,
        sampled,
    ])
}

fn lemma24() -> Outcome {
    let e = |e: p3hull::Error| e.to_string();
    let mut reports = vec![verify_lemma24(&kneser(2, 4, 2), Sampling::Exhaustive).map_err(e)?];
    for (q, k) in [(3, 2), (2, 3)] {
        let r = verify_lemma24(&kneser(q, 2 * k, k), seeded(1000)).map_err(e)?;
        require_samples(&r, 1000)?;
        reports.push(r);
    }
    for q in [2, 3] {
        reports.push(verify_lemma24_construction(q, 4, 200, SEED).map_err(e)?);
    }
    collect(reports)
}

fn theorem_kneser() -> Outcome {
    let mut reports = Vec::new();
    for (q, n, k) in [(2, 5, 2), (2, 6, 2), (3, 5, 2), (2, 7, 3), (2, 4, 2), (3, 4, 2)] {
        reports.push(verify_thm11(&kneser(q, n, k), true).map_err(|e| e.to_string())?);
    }
    collect(reports)
}

fn theorem_grassmann() -> Outcome {
    let mut reports = Vec::new();
    for (q, n, k) in [(2, 4, 2), (2, 5, 2), (3, 4, 2), (2, 6, 3)] {
        let g = grassmann(q, n, k);
        reports.push(verify_thm12(&g).map_err(|e| e.to_string())?);
        reports.push(verify_chain(&g).map_err(|e| e.to_string())?);
    }
    collect(reports)
}

fn convexity_engine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for g in [kneser(2, 4, 2), grassmann(2, 4, 2), kneser(2, 5, 2)] {
        let v = g.vertex_count();
        for trial in 0..100 {
            let size = rng.gen_range(1..=6);
            let ids: Vec<u32> = (0..size).map(|_| rng.gen_range(0..v as u32)).collect();
            let seed = VertexSet::from_ids(v, &ids).unwrap();
            let subset = VertexSet::from_ids(v, &ids[..ids.len() - 1]).unwrap();
            check_hull_properties(&g, &seed, &subset)
                .map_err(|msg| format!("{} q={} n={} k={} trial {trial}: {msg}", g.family(), g.q(), g.n(), g.k()))?;
        }
    }
    Ok("300 seed sets on 3 graphs".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("counting identities", 60, counting_identities),
        ("q-Kneser regularity", 120, regularity),
        ("neighbor class counts d_ij", 600, lemma23),
        ("d_i0 >= 2 sweep", 10, lemma22),
        ("case-2 common neighbors", 300, case2_count),
        ("fourth vertex construction", 300, lemma24),
        ("hull number of K_q(n,k)", 300, theorem_kneser),
        ("hull number of J_q(n,k)", 300, theorem_grassmann),
        ("convexity engine properties", 60, convexity_engine),
    ];
    let mut failed = 0;
    for (number, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over time budget; {d}")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {}: {name} ({:.1}s, limit {limit}s): {detail}", number + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
