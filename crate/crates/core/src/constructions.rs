//! Explicit hull-set pairs and the witness objects behind them.
//!
//! Coordinate vectors are 0-based internally (`e_1` is index 0); labels
//! produced for reports use the 1-based names.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfq::{FieldElement, FieldSpec};
use crate::graphgen::{Family, SubspaceGraph};
use crate::hull::{hull, interval, VertexSet};
use crate::subspace::{enumerate_subspaces, solve_combination, Subspace};

/// `<e_{a+1}, ..., e_{b}>` style label for 0-based coordinate indices.
pub fn span_label(indices: &[usize]) -> String {
    let names: Vec<String> = indices.iter().map(|i| format!("e{}", i + 1)).collect();
    format!("<{}>", names.join(","))
}

fn coord(field: &Arc<FieldSpec>, n: usize, indices: impl IntoIterator<Item = usize>) -> Subspace {
    let idx: Vec<usize> = indices.into_iter().collect();
    Subspace::coordinate(field, n, &idx).expect("coordinate indices below n")
}

/// Case `n >= 2k + 1`: `w1 = <e1..ek>`, `w2 = <e2..e_{k+1}>` and the
/// `(k+1)`-space `u = <e1..e_{k+1}>` containing both.
pub fn kneser_case1_pair(field: &Arc<FieldSpec>, n: usize, k: usize) -> Result<(Subspace, Subspace, Subspace)> {
    if k < 2 || n < 2 * k + 1 {
        return Err(Error::InvalidParams(format!("need k >= 2 and n >= 2k + 1 (got n = {n}, k = {k})")));
    }
    Ok((coord(field, n, 0..k), coord(field, n, 1..k + 1), coord(field, n, 0..k + 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case2Selector {
    /// Intersection dimension 1.
    MinIntersection,
    /// Intersection dimension `k - 1`.
    MaxIntersection,
    /// The `i`-th non-adjacent pair `(a, b)`, `a < b`, in id order.
    ByIndex(usize),
}

/// A non-adjacent pair of `K_q(2k, k)`.
pub fn kneser_case2_pair(field: &Arc<FieldSpec>, k: usize, selector: Case2Selector) -> Result<(Subspace, Subspace)> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("need k >= 2 (got {k})")));
    }
    let n = 2 * k;
    match selector {
        Case2Selector::MinIntersection => {
            Ok((coord(field, n, 0..k), coord(field, n, std::iter::once(0).chain(k + 1..n))))
        }
        Case2Selector::MaxIntersection => {
            Ok((coord(field, n, 0..k), coord(field, n, (0..k - 1).chain(std::iter::once(k)))))
        }
        Case2Selector::ByIndex(index) => {
            let all = enumerate_subspaces(n, k, field)?;
            let mut seen = 0;
            for a in 0..all.len() {
                for b in a + 1..all.len() {
                    if all[a].intersection_dim(&all[b])? > 0 {
                        if seen == index {
                            return Ok((all[a].clone(), all[b].clone()));
                        }
                        seen += 1;
                    }
                }
            }
            Err(Error::InvalidParams(format!("only {seen} non-adjacent pairs exist")))
        }
    }
}

/// Bases adapted to `S = w1 ⊕ w2` and a third k-space `w3`:
/// `w3 = <e_1..e_α> ⊕ <f_1..f_β> ⊕ <e_{α+t} + f_{β+t} : 1 <= t <= γ>`,
/// where `e` spans `w1` and `f` spans `w2`.
#[derive(Debug, Clone)]
pub struct AdaptedBases {
    field: Arc<FieldSpec>,
    ambient: usize,
    pub k: usize,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub e_basis: Vec<Vec<FieldElement>>,
    pub f_basis: Vec<Vec<FieldElement>>,
}

fn add_vectors(field: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect()
}

fn combine(field: &FieldSpec, coeffs: &[FieldElement], vectors: &[&[FieldElement]], n: usize) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::ZERO; n];
    for (&c, v) in coeffs.iter().zip(vectors) {
        if c.is_zero() {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(v.iter()) {
            *o = field.add(*o, field.mul(c, x));
        }
    }
    out
}

/// Appends rows of `space`'s canonical basis that are independent of
/// `vectors` until `vectors` spans `space`.
fn extend_within(
    field: &Arc<FieldSpec>,
    n: usize,
    vectors: &mut Vec<Vec<FieldElement>>,
    space: &Subspace,
) -> Result<()> {
    let mut acc = Subspace::span(field, n, vectors)?;
    for row in space.basis_vectors() {
        if acc.dim() == space.dim() {
            break;
        }
        if !acc.contains_vector(row) {
            vectors.push(row.to_vec());
            acc = Subspace::span(field, n, vectors)?;
        }
    }
    Ok(())
}

/// Makes the basis change behind the normal form explicit.
///
/// `w1 ∩ w3` and `w2 ∩ w3` give `e_1..e_α` and `f_1..f_β`; a complement
/// of their sum inside `w3` is split along `S = w1 ⊕ w2` to give the mixed
/// pairs `e_{α+t}`, `f_{β+t}`; both families are then completed with the
/// first independent rows of the canonical bases of `w1` and `w2`.
pub fn adapted_bases(w1: &Subspace, w2: &Subspace, w3: &Subspace) -> Result<AdaptedBases> {
    let field = w1.field().clone();
    let k = w1.dim();
    let n = w1.ambient();
    if w2.dim() != k || w3.dim() != k || n != 2 * k {
        return Err(Error::PreconditionViolated(format!(
            "need three k-subspaces of F_q^(2k) (dims {}, {}, {} in F_q^{n})",
            w1.dim(),
            w2.dim(),
            w3.dim()
        )));
    }
    if w1.intersection_dim(w2)? != 0 {
        return Err(Error::PreconditionViolated("w1 and w2 must be adjacent (trivial intersection)".into()));
    }
    let i13 = w1.intersection(w3)?;
    let i23 = w2.intersection(w3)?;
    let (alpha, beta) = (i13.dim(), i23.dim());
    if alpha == 0 || beta == 0 {
        return Err(Error::PreconditionViolated(format!(
            "w3 must be non-adjacent to both w1 and w2 (dim w1∩w3 = {alpha}, dim w2∩w3 = {beta})"
        )));
    }
    let gamma = k - alpha - beta;

    let mut fixed: Vec<Vec<FieldElement>> = i13.basis_vectors().chain(i23.basis_vectors()).map(<[_]>::to_vec).collect();
    let mut mixed = Vec::with_capacity(gamma);
    for row in w3.basis_vectors() {
        if fixed.len() == k {
            break;
        }
        if !Subspace::span(&field, n, &fixed)?.contains_vector(row) {
            fixed.push(row.to_vec());
            mixed.push(row.to_vec());
        }
    }
    debug_assert_eq!(mixed.len(), gamma);

    let split_basis: Vec<Vec<FieldElement>> = w1.basis_vectors().chain(w2.basis_vectors()).map(<[_]>::to_vec).collect();
    let w1_rows: Vec<&[FieldElement]> = w1.basis_vectors().collect();
    let w2_rows: Vec<&[FieldElement]> = w2.basis_vectors().collect();
    let mut e_basis: Vec<Vec<FieldElement>> = i13.basis_vectors().map(<[_]>::to_vec).collect();
    let mut f_basis: Vec<Vec<FieldElement>> = i23.basis_vectors().map(<[_]>::to_vec).collect();
    for c in &mixed {
        let x = solve_combination(&field, &split_basis, c).expect("w1 ⊕ w2 spans the ambient space");
        e_basis.push(combine(&field, &x[..k], &w1_rows, n));
        f_basis.push(combine(&field, &x[k..], &w2_rows, n));
    }
    extend_within(&field, n, &mut e_basis, w1)?;
    extend_within(&field, n, &mut f_basis, w2)?;

    Ok(AdaptedBases { field, ambient: n, k, alpha, beta, gamma, e_basis, f_basis })
}

impl AdaptedBases {
    /// Builds bases directly, e.g. for ambient spaces too large to enumerate.
    pub fn from_parts(
        field: &Arc<FieldSpec>,
        alpha: usize,
        beta: usize,
        e_basis: Vec<Vec<FieldElement>>,
        f_basis: Vec<Vec<FieldElement>>,
    ) -> Result<AdaptedBases> {
        let k = e_basis.len();
        let n = 2 * k;
        if f_basis.len() != k || alpha < 1 || beta < 1 || alpha + beta > k {
            return Err(Error::PreconditionViolated(format!(
                "need |e| = |f| = k, 1 <= alpha, beta and alpha + beta <= k (k = {k}, alpha = {alpha}, beta = {beta})"
            )));
        }
        let all: Vec<Vec<FieldElement>> = e_basis.iter().chain(&f_basis).cloned().collect();
        if all.iter().any(|v| v.len() != n) || Subspace::span(field, n, &all)?.dim() != n {
            return Err(Error::PreconditionViolated("e and f must jointly form a basis of F_q^(2k)".into()));
        }
        Ok(AdaptedBases { field: field.clone(), ambient: n, k, alpha, beta, gamma: k - alpha - beta, e_basis, f_basis })
    }

    pub fn w1(&self) -> Subspace {
        Subspace::span(&self.field, self.ambient, &self.e_basis).expect("valid vectors")
    }

    pub fn w2(&self) -> Subspace {
        Subspace::span(&self.field, self.ambient, &self.f_basis).expect("valid vectors")
    }

    // 1-based accessors matching the normal-form notation.
    fn e(&self, i: usize) -> &[FieldElement] {
        &self.e_basis[i - 1]
    }

    fn f(&self, i: usize) -> &[FieldElement] {
        &self.f_basis[i - 1]
    }

    fn ef(&self, i: usize, j: usize) -> Vec<FieldElement> {
        add_vectors(&self.field, self.e(i), self.f(j))
    }

    /// `w3` rebuilt from the normal form.
    pub fn reconstruct_w3(&self) -> Subspace {
        let (a, b) = (self.alpha, self.beta);
        let mut vectors: Vec<Vec<FieldElement>> = (1..=a).map(|i| self.e(i).to_vec()).collect();
        vectors.extend((1..=b).map(|i| self.f(i).to_vec()));
        vectors.extend((1..=self.gamma).map(|t| self.ef(a + t, b + t)));
        Subspace::span(&self.field, self.ambient, &vectors).expect("valid vectors")
    }
}

/// A common neighbor of `w1`, `w2`, `w3` in `K_q(2k, k)`, built from the
/// adapted bases by the `γ >= 2`, `γ = 1` and `γ = 0` pairings.
pub fn lemma24_w4(bases: &AdaptedBases) -> Subspace {
    let (a, b, g, k) = (bases.alpha, bases.beta, bases.gamma, bases.k);
    let mut vectors = Vec::with_capacity(k);
    match g {
        0 => {
            vectors.extend((1..=b).map(|t| bases.ef(a + t, t)));
            vectors.extend((1..=a).map(|s| bases.ef(s, b + s)));
        }
        1 => {
            vectors.extend((0..=b).map(|t| bases.ef(a + 1 + t, 1 + t)));
            vectors.extend((1..=a).map(|s| bases.ef(s, b + 1 + s)));
        }
        _ => {
            vectors.extend((1..g).map(|t| bases.ef(a + t, b + t + 1)));
            vectors.extend((0..=b).map(|t| bases.ef(a + g + t, 1 + t)));
            vectors.extend((1..=a).map(|s| bases.ef(s, b + g + s)));
        }
    }
    debug_assert_eq!(vectors.len(), k);
    Subspace::span(&bases.field, bases.ambient, &vectors).expect("valid vectors")
}

/// The seed pair `v1`, `v2` for `J_q(n,k)` and the four vertices `u_i`
/// adjacent to both.
#[derive(Debug, Clone)]
pub struct GrassmannPair {
    pub v1: Subspace,
    pub v2: Subspace,
    pub u: [Subspace; 4],
}

/// `v1 = <k-2> ⊕ <e_{k-1}, e_k>`, `v2 = <k-2> ⊕ <e_{k+1}, e_{k+2}>`, and
/// `u_1..u_4` = `<k-2>` plus one of `e_{k-1}, e_k` and one of `e_{k+1}, e_{k+2}`.
pub fn grassmann_pair(field: &Arc<FieldSpec>, n: usize, k: usize) -> Result<GrassmannPair> {
    if k < 2 || n < 2 * k {
        return Err(Error::InvalidParams(format!("need n >= 2k >= 4 (got n = {n}, k = {k})")));
    }
    let with = |extra: [usize; 2]| coord(field, n, (0..k - 2).chain(extra));
    Ok(GrassmannPair {
        v1: with([k - 2, k - 1]),
        v2: with([k, k + 1]),
        u: [with([k - 2, k]), with([k - 2, k + 1]), with([k - 1, k]), with([k - 1, k + 1])],
    })
}

/// The seed pair used by the explicit constructions for `g`.
///
/// `K_q(n,1) = J_q(n,1)` is complete, so any two vertices work there.
pub fn explicit_hull_pair(g: &SubspaceGraph) -> Result<(Subspace, Subspace)> {
    let (n, k) = (g.n(), g.k());
    let field = g.field();
    if k == 0 || n < 2 * k {
        return Err(Error::InvalidParams(format!("no construction for n = {n}, k = {k}; need n >= 2k >= 2")));
    }
    if k == 1 {
        return Ok((g.vertex(0)?.clone(), g.vertex(1)?.clone()));
    }
    match g.family() {
        Family::QKneser if n > 2 * k => {
            let (w1, w2, _) = kneser_case1_pair(field, n, k)?;
            Ok((w1, w2))
        }
        Family::QKneser => kneser_case2_pair(field, k, Case2Selector::MaxIntersection),
        Family::Grassmann => {
            let p = grassmann_pair(field, n, k)?;
            Ok((p.v1, p.v2))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageResult {
    pub stage: String,
    pub description: String,
    pub passed: bool,
    pub detail: String,
    pub counterexample: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub stages: Vec<StageResult>,
    pub hull_size: usize,
    pub vertex_count: usize,
    pub all_passed: bool,
}

fn stage(g: &SubspaceGraph, stage: &str, description: String, missing: Option<u32>, detail: String) -> StageResult {
    StageResult {
        stage: stage.into(),
        description,
        passed: missing.is_none(),
        detail,
        counterexample: missing.map(|id| vec![g.vertex(id).expect("id from graph").canonical_form()]),
    }
}

fn first_missing(inner: &VertexSet, outer: &VertexSet) -> Option<u32> {
    inner.iter().find(|&v| !outer.contains(v))
}

fn containing(g: &SubspaceGraph, sub: &Subspace) -> VertexSet {
    let mut s = VertexSet::new(g.vertex_count());
    for (id, w) in g.vertices().iter().enumerate() {
        if w.contains(sub).expect("same ambient space") {
            s.insert(id as u32);
        }
    }
    s
}

/// Replays the Grassmann hull argument stage by stage on a built graph.
///
/// Stages: (a) `u_1..u_4 ∈ I[{v1, v2}]`; (b) `C1, C2 ⊆ H`; (c) `D_0 ⊆ H`;
/// (d) `D_{i-1} ⊆ D_i ⊆ I[D_{i-1}]` for `1 <= i <= k-2`; (e) `D_{k-2} = V`.
/// The argument is carried out in `J_q(n,k)` for every `n >= 2k`.
pub fn verify_grassmann_chain(g: &SubspaceGraph) -> Result<ChainReport> {
    if g.family() != Family::Grassmann {
        return Err(Error::InvalidParams("the chain check needs a Grassmann graph".into()));
    }
    let (n, k) = (g.n(), g.k());
    let field = g.field().clone();
    let pair = grassmann_pair(&field, n, k)?;
    let id = |s: &Subspace| g.id_of(s).expect("constructed vertex lies in the graph");
    let seed = VertexSet::from_ids(g.vertex_count(), &[id(&pair.v1), id(&pair.v2)])?;
    let first = interval(g, &seed)?;
    let (h, _) = hull(g, &seed)?;
    let mut stages = Vec::new();

    let missing = pair.u.iter().map(id).find(|&u| !first.contains(u));
    stages.push(stage(g, "a", "u1..u4 lie in I[{v1, v2}]".into(), missing, format!("|I[T]| = {}", first.len())));

    let base = |extra: Option<usize>| coord(&field, n, (0..k - 2).chain(extra));
    let c1 = containing(g, &base(Some(k - 2)));
    let c2 = containing(g, &base(Some(k - 1)));
    let missing = first_missing(&c1, &h).or_else(|| first_missing(&c2, &h));
    stages.push(stage(
        g,
        "b",
        format!(
            "C1 = {{w ⊇ {}}} and C2 = {{w ⊇ {}}} lie in H(T)",
            span_label(&(0..k - 1).collect::<Vec<_>>()),
            span_label(&(0..k - 2).chain([k - 1]).collect::<Vec<_>>())
        ),
        missing,
        format!("|C1| = {}, |C2| = {}", c1.len(), c2.len()),
    ));

    let d: Vec<VertexSet> = (0..=k - 2).map(|i| containing(g, &coord(&field, n, 0..k - 2 - i))).collect();
    stages.push(stage(
        g,
        "c",
        format!("D_0 = {{w ⊇ {}}} lies in H(T)", span_label(&(0..k - 2).collect::<Vec<_>>())),
        first_missing(&d[0], &h),
        format!("|D_0| = {}", d[0].len()),
    ));

    let mut missing = None;
    let mut sizes = Vec::new();
    for i in 1..=k - 2 {
        let step = interval(g, &d[i - 1])?;
        sizes.push(d[i].len());
        missing = first_missing(&d[i - 1], &d[i]).or_else(|| first_missing(&d[i], &step));
        if missing.is_some() {
            break;
        }
    }
    let detail = if k == 2 { "empty chain (k = 2)".to_string() } else { format!("|D_1..D_(k-2)| = {sizes:?}") };
    stages.push(stage(g, "d", "D_(i-1) ⊆ D_i ⊆ I[D_(i-1)] for 1 <= i <= k-2".into(), missing, detail));

    let full = VertexSet::full(g.vertex_count());
    stages.push(stage(
        g,
        "e",
        "D_(k-2) is the whole vertex set".into(),
        first_missing(&full, &d[k - 2]),
        format!("|D_(k-2)| = {}", d[k - 2].len()),
    ));

    let all_passed = stages.iter().all(|s| s.passed);
    Ok(ChainReport { q: g.q(), n, k, stages, hull_size: h.len(), vertex_count: g.vertex_count(), all_passed })
}
