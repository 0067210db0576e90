//! Verification drivers: each check pits a closed form or an explicit
//! construction against brute force on a materialized graph and returns a
//! [`CheckReport`].

use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{adapted_bases, explicit_hull_pair, lemma24_w4, verify_grassmann_chain, AdaptedBases};
use crate::error::{Error, Result};
use crate::gfq::{make_field, FieldElement, FieldSpec};
use crate::graphgen::{build_graph, BuildCaps, Family, SubspaceGraph};
use crate::hull::{hull_of_ids, verify_no_singleton_hull};
use crate::qcomb::{check_d_i0_bound, count_a, count_case2_common, count_dij, gaussian_binomial, CountParams, QInt};
use crate::subspace::{enumerate_subspaces_capped, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub target: String,
    pub params: String,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub checked: u64,
    pub detail: String,
    pub counterexample: Option<Vec<String>>,
}

impl CheckReport {
    fn new(target: &str, params: String) -> CheckReport {
        CheckReport {
            target: target.into(),
            params,
            passed: true,
            checked: 0,
            detail: String::new(),
            counterexample: None,
        }
    }

    fn fail(&mut self, detail: String, counterexample: Vec<String>) {
        if self.passed {
            self.passed = false;
            self.detail = detail;
            self.counterexample = Some(counterexample);
        }
    }
}

/// How pairs or triples are drawn for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    Seeded { samples: usize, seed: u64 },
}

fn params(q: u64, n: usize, k: usize) -> String {
    format!("q={q} n={n} k={k}")
}

pub fn field(q: u64) -> Result<Arc<FieldSpec>> {
    Ok(Arc::new(make_field(q)?))
}

pub fn graph(family: Family, q: u64, n: usize, k: usize, caps: BuildCaps) -> Result<SubspaceGraph> {
    build_graph(family, &field(q)?, n, k, caps)
}

fn forms(g: &SubspaceGraph, ids: &[u32]) -> Vec<String> {
    ids.iter().map(|&id| g.vertex(id).map(|s| s.canonical_form()).unwrap_or_default()).collect()
}

fn coordinate_prefix(field: &Arc<FieldSpec>, n: usize, m: usize) -> Subspace {
    Subspace::coordinate(field, n, &(0..m).collect::<Vec<_>>()).expect("m <= n")
}

/// Class sizes `|{w : dim(w ∩ <e1..em>) = i}|` against the closed form, for
/// one `m` or every `m <= n`, plus the enumeration count.
pub fn verify_lemma21(q: u64, n: usize, k: usize, m: Option<usize>, cap: u64) -> Result<CheckReport> {
    let f = field(q)?;
    let mut report = CheckReport::new("lemma21", params(q, n, k));
    let all = enumerate_subspaces_capped(n, k, &f, cap)?;
    report.checked += 1;
    let expected_total = gaussian_binomial(n as u32, k as u32, q);
    if QInt::from(all.len()) != expected_total {
        report.fail(format!("enumerated {} subspaces, expected {expected_total}", all.len()), vec![]);
    }
    let ms: Vec<usize> = match m {
        Some(m) if m > n => return Err(Error::InvalidParams(format!("m = {m} exceeds n = {n}"))),
        Some(m) => vec![m],
        None => (0..=n).collect(),
    };
    for &m in &ms {
        let u = coordinate_prefix(&f, n, m);
        let mut sizes = vec![0u64; k + 1];
        for w in &all {
            sizes[u.intersection_dim(w)?] += 1;
        }
        for (i, &size) in sizes.iter().enumerate() {
            report.checked += 1;
            let formula = count_a(&CountParams::new(n as u32, m as u32, k as u32, i as u32, 0, q));
            if QInt::from(size) != formula {
                report
                    .fail(format!("m={m} i={i}: brute force {size}, closed form {formula}"), vec![u.canonical_form()]);
            }
        }
    }
    if report.passed {
        report.detail = format!("class sizes agree for m in {ms:?}");
    }
    Ok(report)
}

/// `d_{i0} >= 2` for `m = k + 1`, closed form only.
pub fn verify_lemma22(q: u64, n: usize, k: usize) -> Result<CheckReport> {
    let r = check_d_i0_bound(n as u32, k as u32, q)?;
    let mut report = CheckReport::new("lemma22", params(q, n, k));
    report.checked = r.values.len() as u64;
    let listing: Vec<String> = r.values.iter().map(|v| format!("d_{}0 = {}", v.i, v.value)).collect();
    report.detail = listing.join(", ");
    if !r.all_at_least_two {
        report.passed = false;
    }
    Ok(report)
}

/// Brute-force `|N(x) ∩ A(u, j)|` for every vertex `x` and `j != i` in
/// `K_q(n,k)`, against `d_ij`, with `u = <e1..em>`.
pub fn verify_lemma23(g: &SubspaceGraph, m: Option<usize>) -> Result<CheckReport> {
    if g.family() != Family::QKneser {
        return Err(Error::InvalidParams("lemma23 needs a q-Kneser graph".into()));
    }
    let (q, n, k) = (u64::from(g.q()), g.n(), g.k());
    let mut report = CheckReport::new("lemma23", params(q, n, k));
    let ms: Vec<usize> = match m {
        Some(m) if m + k > n => return Err(Error::InvalidParams(format!("need m <= n - k (m = {m})"))),
        Some(m) => vec![m],
        None => (0..=n - k).collect(),
    };
    for &m in &ms {
        let u = coordinate_prefix(g.field(), n, m);
        let classes = g.partition_by_intersection(&u)?;
        let mut class_of = vec![0usize; g.vertex_count()];
        for (i, class) in classes.iter().enumerate() {
            for &v in class {
                class_of[v as usize] = i;
            }
        }
        let table: Vec<Vec<Option<QInt>>> = (0..=k)
            .map(|i| {
                (0..=k)
                    .map(|j| {
                        (i != j).then(|| {
                            count_dij(&CountParams::new(n as u32, m as u32, k as u32, i as u32, j as u32, q))
                                .expect("validated parameters")
                        })
                    })
                    .collect()
            })
            .collect();
        let mismatch = (0..g.vertex_count() as u32).into_par_iter().find_first(|&x| {
            let i = class_of[x as usize];
            let mut counts = vec![0u64; k + 1];
            for &y in g.adj(x) {
                counts[class_of[y as usize]] += 1;
            }
            (0..=k).any(|j| j != i && table[i][j].as_ref() != Some(&QInt::from(counts[j])))
        });
        report.checked += (g.vertex_count() * k) as u64;
        if let Some(x) = mismatch {
            let i = class_of[x as usize];
            report.fail(
                format!("m={m}: vertex {x} in class {i} disagrees with d_{i}j"),
                vec![u.canonical_form(), g.vertex(x)?.canonical_form()],
            );
        }
    }
    if report.passed {
        report.detail = format!("all vertices, all j != i, m in {ms:?}");
    }
    Ok(report)
}

fn require_case2(g: &SubspaceGraph) -> Result<()> {
    if g.family() != Family::QKneser || g.n() != 2 * g.k() || g.k() < 2 {
        return Err(Error::InvalidParams("need K_q(2k, k) with k >= 2".into()));
    }
    Ok(())
}

/// Non-adjacent distinct pairs `(a, b)`, `a < b`, either all of them or a
/// seeded sample.
pub fn nonadjacent_pairs(g: &SubspaceGraph, sampling: Sampling) -> Vec<(u32, u32)> {
    let v = g.vertex_count() as u32;
    match sampling {
        Sampling::Exhaustive => {
            (0..v).flat_map(|a| (a + 1..v).filter(move |&b| !g.is_adjacent(a, b)).map(move |b| (a, b))).collect()
        }
        Sampling::Seeded { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(samples);
            let mut attempts = 0usize;
            while out.len() < samples && attempts < samples * 1000 + 1000 {
                attempts += 1;
                let (a, b) = (rng.gen_range(0..v), rng.gen_range(0..v));
                if a != b && !g.is_adjacent(a, b) {
                    out.push((a.min(b), a.max(b)));
                }
            }
            out
        }
    }
}

/// Common-neighbor counts of non-adjacent pairs in `K_q(2k, k)` against
/// `q^{k^2 - a(a+1)/2} [a]!` with `a = k - dim(w1 ∩ w2)`.
pub fn verify_case2count(g: &SubspaceGraph, sampling: Sampling) -> Result<CheckReport> {
    require_case2(g)?;
    let (q, k) = (u64::from(g.q()), g.k());
    let mut report = CheckReport::new("case2count", params(q, g.n(), k));
    let pairs = nonadjacent_pairs(g, sampling);
    let formulas: Vec<QInt> = (1..k).map(|a| count_case2_common(k as u32, a as u32, q).expect("1 <= a < k")).collect();
    let bad = pairs.par_iter().find_first(|&&(a, b)| {
        let dim = g.vertices()[a as usize].intersection_dim(&g.vertices()[b as usize]).expect("same space");
        let common = g.common_neighbor_count(a, b);
        QInt::from(common) != formulas[k - dim - 1]
    });
    report.checked = pairs.len() as u64;
    match bad {
        Some(&(a, b)) => report
            .fail(format!("pair ({a}, {b}) has {} common neighbors", g.common_neighbor_count(a, b)), forms(g, &[a, b])),
        None => report.detail = format!("{} non-adjacent pairs", pairs.len()),
    }
    Ok(report)
}

/// Qualifying triples `(w1, w2, w3)`: `w1 ~ w2`, `w3` adjacent to neither.
pub fn lemma24_triples(g: &SubspaceGraph, sampling: Sampling) -> Vec<(u32, u32, u32)> {
    let v = g.vertex_count() as u32;
    let qualifies = |a: u32, b: u32, c: u32| !g.is_adjacent(a, c) && !g.is_adjacent(b, c);
    match sampling {
        Sampling::Exhaustive => (0..v)
            .flat_map(|a| {
                g.adj(a).iter().flat_map(move |&b| (0..v).filter(move |&c| qualifies(a, b, c)).map(move |c| (a, b, c)))
            })
            .collect(),
        Sampling::Seeded { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(samples);
            let mut attempts = 0usize;
            while out.len() < samples && attempts < samples * 1000 + 1000 {
                attempts += 1;
                let a = rng.gen_range(0..v);
                let Some(&b) = g.adj(a).choose(&mut rng) else { continue };
                let c = rng.gen_range(0..v);
                if qualifies(a, b, c) {
                    out.push((a, b, c));
                }
            }
            out
        }
    }
}

fn check_w4(bases: &AdaptedBases, w1: &Subspace, w2: &Subspace, w3: &Subspace) -> bool {
    let w4 = lemma24_w4(bases);
    w4.dim() == bases.k
        && bases.reconstruct_w3() == *w3
        && [w1, w2, w3].iter().all(|w| w4.intersection_dim(w).expect("same space") == 0)
}

/// The constructed `w4` is adjacent to `w1`, `w2` and `w3` for every
/// qualifying triple of `K_q(2k, k)` (or a seeded sample).
pub fn verify_lemma24(g: &SubspaceGraph, sampling: Sampling) -> Result<CheckReport> {
    require_case2(g)?;
    let mut report = CheckReport::new("lemma24", params(u64::from(g.q()), g.n(), g.k()));
    let triples = lemma24_triples(g, sampling);
    let vs = g.vertices();
    let bad = triples.par_iter().find_first(|&&(a, b, c)| {
        let (w1, w2, w3) = (&vs[a as usize], &vs[b as usize], &vs[c as usize]);
        match adapted_bases(w1, w2, w3) {
            Ok(bases) => !check_w4(&bases, w1, w2, w3),
            Err(_) => true,
        }
    });
    report.checked = triples.len() as u64;
    match bad {
        Some(&(a, b, c)) => report.fail(format!("triple ({a}, {b}, {c}) fails"), forms(g, &[a, b, c])),
        None => report.detail = format!("{} qualifying triples", triples.len()),
    }
    Ok(report)
}

/// Pure-construction check for the `γ >= 2` pairing in `F_q^{2k}`, without
/// building a graph: every `(α, β)` with `α + β <= k - 2`, random bases of
/// the two halves, `samples` draws each.
pub fn verify_lemma24_construction(q: u64, k: usize, samples: usize, seed: u64) -> Result<CheckReport> {
    if k < 4 {
        return Err(Error::InvalidParams("gamma >= 2 needs k >= 4".into()));
    }
    let f = field(q)?;
    let n = 2 * k;
    let mut report = CheckReport::new("lemma24-construction", format!("q={q} n={n} k={k}"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for alpha in 1..k - 2 {
        for beta in 1..=k - 2 - alpha {
            for _ in 0..samples {
                let (e, fb) = random_split_basis(&f, n, k, &mut rng);
                let bases = AdaptedBases::from_parts(&f, alpha, beta, e, fb)?;
                let (w1, w2, w3) = (bases.w1(), bases.w2(), bases.reconstruct_w3());
                report.checked += 1;
                let w4 = lemma24_w4(&bases);
                let ok =
                    w4.dim() == k && [&w1, &w2, &w3].iter().all(|w| w4.intersection_dim(w).expect("same space") == 0);
                if !ok {
                    report.fail(
                        format!("alpha={alpha} beta={beta} gamma={}", bases.gamma),
                        vec![w1.canonical_form(), w2.canonical_form(), w3.canonical_form()],
                    );
                }
            }
        }
    }
    if report.passed {
        report.detail = format!("{} constructions with gamma >= 2", report.checked);
    }
    Ok(report)
}

/// Random `e`, `f` with `<e> ⊕ <f> = F_q^n`: the rows of a random
/// invertible matrix split in half.
fn random_split_basis(
    f: &Arc<FieldSpec>,
    n: usize,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec<FieldElement>>, Vec<Vec<FieldElement>>) {
    loop {
        let rows: Vec<Vec<FieldElement>> = (0..n)
            .map(|_| (0..n).map(|_| f.element(rng.gen_range(0..f.order())).expect("in range")).collect())
            .collect();
        if Subspace::span(f, n, &rows).expect("valid").dim() == n {
            let (e, fb) = rows.split_at(k);
            return (e.to_vec(), fb.to_vec());
        }
    }
}

/// For non-adjacent `w1, w2` in `K_q(2k, k)`: every `x ∈ N(w1) \ N(w2)` has
/// a neighbor in `N(w1) ∩ N(w2)` (and symmetrically), and the hull of the
/// pair contains `N(w1) ∪ N(w2)`.
pub fn verify_lemma25(g: &SubspaceGraph, sampling: Sampling) -> Result<CheckReport> {
    require_case2(g)?;
    let mut report = CheckReport::new("lemma25", params(u64::from(g.q()), g.n(), g.k()));
    let pairs = nonadjacent_pairs(g, sampling);
    let bad = pairs.par_iter().find_map_first(|&(a, b)| {
        let na: HashSet<u32> = g.adj(a).iter().copied().collect();
        let nb: HashSet<u32> = g.adj(b).iter().copied().collect();
        for (own, other) in [(&na, &nb), (&nb, &na)] {
            for &x in own.iter().filter(|x| !other.contains(x)) {
                if !g.adj(x).iter().any(|y| na.contains(y) && nb.contains(y)) {
                    return Some((a, b, x));
                }
            }
        }
        let (h, _) = hull_of_ids(g, &[a, b]).expect("ids in range");
        na.iter().chain(&nb).find(|&&x| !h.contains(x)).map(|&x| (a, b, x))
    });
    report.checked = pairs.len() as u64;
    match bad {
        Some((a, b, x)) => report.fail(format!("pair ({a}, {b}) misses neighbor {x}"), forms(g, &[a, b, x])),
        None => report.detail = format!("{} non-adjacent pairs", pairs.len()),
    }
    Ok(report)
}

/// `h(K_q(n,k)) = 2`: the explicit pair spreads to every vertex and no single
/// vertex does. With `every_pair`, for `n = 2k` also every non-adjacent pair.
pub fn verify_thm11(g: &SubspaceGraph, every_pair: bool) -> Result<CheckReport> {
    if g.family() != Family::QKneser {
        return Err(Error::InvalidParams("thm11 needs a q-Kneser graph".into()));
    }
    let mut report = hull_number_check("thm11", g)?;
    if report.passed && every_pair && g.n() == 2 * g.k() {
        let pairs = nonadjacent_pairs(g, Sampling::Exhaustive);
        let bad = pairs.par_iter().find_first(|&&(a, b)| !hull_of_ids(g, &[a, b]).expect("ids in range").0.is_full());
        report.checked += pairs.len() as u64;
        match bad {
            Some(&(a, b)) => report.fail(format!("non-adjacent pair ({a}, {b}) is not a hull set"), forms(g, &[a, b])),
            None => report.detail.push_str(&format!("; all {} non-adjacent pairs are hull sets", pairs.len())),
        }
    }
    Ok(report)
}

/// `h(J_q(n,k)) = 2` via the explicit pair plus the singleton check.
pub fn verify_thm12(g: &SubspaceGraph) -> Result<CheckReport> {
    if g.family() != Family::Grassmann {
        return Err(Error::InvalidParams("thm12 needs a Grassmann graph".into()));
    }
    hull_number_check("thm12", g)
}

fn hull_number_check(target: &str, g: &SubspaceGraph) -> Result<CheckReport> {
    let mut report = CheckReport::new(target, params(u64::from(g.q()), g.n(), g.k()));
    let (w1, w2) = explicit_hull_pair(g)?;
    let ids = [g.id_of(&w1).expect("vertex"), g.id_of(&w2).expect("vertex")];
    let (h, trace) = hull_of_ids(g, &ids)?;
    report.checked = 1 + g.vertex_count() as u64;
    if !h.is_full() {
        report.fail(format!("explicit pair reaches {}/{}", h.len(), g.vertex_count()), forms(g, &ids));
        return Ok(report);
    }
    if !verify_no_singleton_hull(g) {
        report.fail("some single vertex spreads".into(), vec![]);
        return Ok(report);
    }
    report.detail = format!(
        "explicit pair spreads to {}/{} in {} rounds; no singleton spreads; h = 2",
        h.len(),
        g.vertex_count(),
        trace.converged_at
    );
    Ok(report)
}

pub fn verify_chain(g: &SubspaceGraph) -> Result<CheckReport> {
    let chain = verify_grassmann_chain(g)?;
    let mut report = CheckReport::new("chain", params(u64::from(g.q()), g.n(), g.k()));
    report.checked = chain.stages.len() as u64;
    let summary: Vec<String> = chain
        .stages
        .iter()
        .map(|s| format!("({}) {} [{}]", s.stage, if s.passed { "pass" } else { "FAIL" }, s.detail))
        .collect();
    report.detail = summary.join("; ");
    if let Some(s) = chain.stages.iter().find(|s| !s.passed) {
        report.passed = false;
        report.counterexample = s.counterexample.clone();
    }
    Ok(report)
}

/// The desk-scale preset behind `verify --target all`.
pub fn desk_preset(caps: BuildCaps, seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let sampled = Sampling::Seeded { samples: 1000, seed };

    for (q, n, k) in [(2, 4, 2), (2, 5, 2), (3, 4, 2), (2, 6, 3)] {
        out.push(verify_lemma21(q, n, k, None, caps.max_vertices)?);
    }
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        for k in 2..=6usize {
            for n in 2 * k + 1..=14 {
                out.push(verify_lemma22(q, n, k)?);
            }
        }
    }
    for (q, n, k) in [(2, 4, 2), (2, 5, 2), (3, 4, 2), (2, 6, 3)] {
        out.push(verify_lemma23(&graph(Family::QKneser, q, n, k, caps)?, None)?);
    }
    for (q, k, sampling) in [(2, 2, Sampling::Exhaustive), (3, 2, Sampling::Exhaustive), (2, 3, sampled)] {
        let g = graph(Family::QKneser, q, 2 * k, k, caps)?;
        out.push(verify_case2count(&g, sampling)?);
        let triples = if q == 2 && k == 2 { Sampling::Exhaustive } else { sampled };
        out.push(verify_lemma24(&g, triples)?);
        out.push(verify_lemma25(&g, sampling)?);
    }
    out.push(verify_lemma24_construction(2, 4, 20, seed)?);
    for (q, n, k) in [(2, 5, 2), (2, 6, 2), (3, 5, 2), (2, 7, 3), (2, 4, 2), (3, 4, 2)] {
        out.push(verify_thm11(&graph(Family::QKneser, q, n, k, caps)?, true)?);
    }
    for (q, n, k) in [(2, 4, 2), (2, 5, 2), (3, 4, 2), (2, 6, 3)] {
        let g = graph(Family::Grassmann, q, n, k, caps)?;
        out.push(verify_thm12(&g)?);
        out.push(verify_chain(&g)?);
    }
    Ok(out)
}
