//! P3-convexity: the interval operator `I[T]`, hull fixpoints with
//! synchronous round traces, and hull-pair search.
//!
//! `I[T]` adds every vertex with at least two neighbors in `T`; iterating it
//! is bootstrap percolation with threshold 2.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::explicit_hull_pair;
use crate::error::{Error, Result};
use crate::graphgen::{Family, SubspaceGraph};

/// Set of vertex ids of a fixed graph, backed by a bitset.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexSet {
    bits: Vec<u64>,
    len: usize,
    universe: usize,
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl VertexSet {
    pub fn new(universe: usize) -> VertexSet {
        VertexSet { bits: vec![0; universe.div_ceil(64)], len: 0, universe }
    }

    pub fn full(universe: usize) -> VertexSet {
        let mut s = VertexSet::new(universe);
        for v in 0..universe as u32 {
            s.insert(v);
        }
        s
    }

    pub fn from_ids(universe: usize, ids: &[u32]) -> Result<VertexSet> {
        let mut s = VertexSet::new(universe);
        for &id in ids {
            if id as usize >= universe {
                return Err(Error::IdOutOfRange { id: id.into(), len: universe });
            }
            s.insert(id);
        }
        Ok(s)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.universe
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        let v = v as usize;
        v < self.universe && self.bits[v / 64] >> (v % 64) & 1 == 1
    }

    /// Inserts `v` (which must be below the universe size); returns whether
    /// it was newly added.
    #[inline]
    pub fn insert(&mut self, v: u32) -> bool {
        let v = v as usize;
        assert!(v < self.universe, "vertex {v} outside universe {}", self.universe);
        let word = &mut self.bits[v / 64];
        let mask = 1u64 << (v % 64);
        let fresh = *word & mask == 0;
        *word |= mask;
        self.len += usize::from(fresh);
        fresh
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                (word != 0).then(|| {
                    let t = word.trailing_zeros();
                    word &= word - 1;
                    (w * 64) as u32 + t
                })
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0) && self.bits.len() <= other.bits.len()
    }
}

/// Round-by-round record of a hull computation: `rounds[p - 1]` holds
/// `I^p[T] \ I^{p-1}[T]`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfectionTrace {
    pub rounds: Vec<Vec<u32>>,
    pub converged_at: usize,
}

fn check_universe(g: &SubspaceGraph, t: &VertexSet) -> Result<()> {
    if t.universe() != g.vertex_count() {
        return Err(Error::IdOutOfRange { id: t.universe() as u64, len: g.vertex_count() });
    }
    Ok(())
}

/// `I[T] = T ∪ {v : |N(v) ∩ T| >= 2}`.
pub fn interval(g: &SubspaceGraph, t: &VertexSet) -> Result<VertexSet> {
    check_universe(g, t)?;
    let mut out = t.clone();
    for v in 0..g.vertex_count() as u32 {
        if !t.contains(v) && g.adj(v).iter().filter(|&&w| t.contains(w)).take(2).count() == 2 {
            out.insert(v);
        }
    }
    Ok(out)
}

/// Hull `H(T)` with its synchronous round trace.
///
/// Level-synchronous counter propagation: each newly infected vertex bumps
/// the counters of its uninfected neighbors once, while its own round is
/// being processed; a vertex whose counter reaches 2 joins the next round.
/// This is `O(V + E)` and reproduces `I^{p+1}[T] = I[I^p[T]]` exactly.
pub fn hull(g: &SubspaceGraph, t: &VertexSet) -> Result<(VertexSet, InfectionTrace)> {
    check_universe(g, t)?;
    let mut infected = t.clone();
    let mut counters = vec![0u8; g.vertex_count()];
    let mut frontier: Vec<u32> = t.to_vec();
    let mut rounds = Vec::new();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in g.adj(v) {
                if infected.contains(w) {
                    continue;
                }
                let c = &mut counters[w as usize];
                *c += 1;
                if *c == 2 {
                    infected.insert(w);
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        rounds.push(next.clone());
        frontier = next;
    }
    let converged_at = rounds.len();
    Ok((infected, InfectionTrace { rounds, converged_at }))
}

pub fn hull_of_ids(g: &SubspaceGraph, ids: &[u32]) -> Result<(VertexSet, InfectionTrace)> {
    hull(g, &VertexSet::from_ids(g.vertex_count(), ids)?)
}

/// Hull by repeated full sweeps of [`interval`]; the slow reference.
pub fn hull_by_sweeps(g: &SubspaceGraph, t: &VertexSet) -> Result<(VertexSet, usize)> {
    let mut current = t.clone();
    let mut sweeps = 0;
    loop {
        let next = interval(g, &current)?;
        if next.len() == current.len() {
            return Ok((current, sweeps));
        }
        current = next;
        sweeps += 1;
    }
}

pub fn is_hull_set(g: &SubspaceGraph, t: &VertexSet) -> Result<bool> {
    Ok(hull(g, t)?.0.is_full())
}

/// True iff no single vertex spreads, i.e. `h(G) >= 2`.
pub fn verify_no_singleton_hull(g: &SubspaceGraph) -> bool {
    if g.vertex_count() < 2 {
        log::warn!("graph has {} vertices; the singleton check is vacuous", g.vertex_count());
        return true;
    }
    (0..g.vertex_count() as u32).into_par_iter().all(|v| {
        let (h, _) = hull_of_ids(g, &[v]).expect("id in range");
        h.len() == 1
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStrategy {
    /// The explicit pair from the hull-number proofs.
    PaperConstruction,
    /// Pin `v1` to vertex 0 and scan `v2`; sound only under vertex
    /// transitivity, so it is never applied implicitly.
    FixFirstExhaustive,
    /// Every unordered pair.
    FullExhaustive,
}

impl std::str::FromStr for PairStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<PairStrategy> {
        match s {
            "paper" | "paper_construction" | "paper-construction" => Ok(PairStrategy::PaperConstruction),
            "fix-first" | "fix_first" | "fix_first_exhaustive" => Ok(PairStrategy::FixFirstExhaustive),
            "full" | "full_exhaustive" | "full-exhaustive" => Ok(PairStrategy::FullExhaustive),
            other => Err(Error::Parse(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_hull_computations: u64,
    pub time_limit: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_hull_computations: 5_000_000, time_limit: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HullWitness {
    pub v1: u32,
    pub v2: u32,
    pub hull_size: usize,
    pub trace: InfectionTrace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairSearchReport {
    pub strategy: PairStrategy,
    pub witness: Option<HullWitness>,
    /// Every working pair found, in enumeration order (exhaustive strategies).
    pub working_pairs: Vec<(u32, u32)>,
    pub pairs_tested: u64,
}

/// Searches for a pair `{v1, v2}` whose hull is the whole vertex set.
pub fn find_hull_pair(g: &SubspaceGraph, strategy: PairStrategy, budget: SearchBudget) -> Result<PairSearchReport> {
    let v = g.vertex_count() as u32;
    let witness_for = |a: u32, b: u32| -> HullWitness {
        let (h, trace) = hull_of_ids(g, &[a, b]).expect("ids in range");
        HullWitness { v1: a, v2: b, hull_size: h.len(), trace }
    };
    match strategy {
        PairStrategy::PaperConstruction => {
            let (w1, w2) = explicit_hull_pair(g)?;
            let (a, b) = (
                g.id_of(&w1).expect("constructed vertex lies in the graph"),
                g.id_of(&w2).expect("constructed vertex lies in the graph"),
            );
            let w = witness_for(a, b);
            let works = w.hull_size == g.vertex_count();
            Ok(PairSearchReport {
                strategy,
                working_pairs: if works { vec![(a, b)] } else { Vec::new() },
                witness: works.then_some(w),
                pairs_tested: 1,
            })
        }
        PairStrategy::FixFirstExhaustive | PairStrategy::FullExhaustive => {
            let firsts: Vec<u32> = match strategy {
                PairStrategy::FixFirstExhaustive => (v > 0).then_some(0).into_iter().collect(),
                _ => (0..v).collect(),
            };
            let stop_at_first = strategy == PairStrategy::FixFirstExhaustive;
            let start = Instant::now();
            let mut tested = 0u64;
            let mut working = Vec::new();
            for a in firsts {
                let pending = u64::from(v - a - 1);
                if tested + pending > budget.max_hull_computations {
                    return Err(Error::LimitExceeded(format!(
                        "pair budget {} exhausted after {tested} pairs ({} working so far)",
                        budget.max_hull_computations,
                        working.len()
                    )));
                }
                if let Some(limit) = budget.time_limit {
                    if start.elapsed() > limit {
                        return Err(Error::LimitExceeded(format!(
                            "time budget {limit:?} exhausted after {tested} pairs ({} working so far)",
                            working.len()
                        )));
                    }
                }
                let row: Vec<(u32, u32)> = (a + 1..v)
                    .into_par_iter()
                    .filter(|&b| {
                        let t = VertexSet::from_ids(v as usize, &[a, b]).expect("ids in range");
                        is_hull_set(g, &t).expect("same graph")
                    })
                    .map(|b| (a, b))
                    .collect();
                tested += pending;
                working.extend(row);
                if stop_at_first && !working.is_empty() {
                    break;
                }
            }
            let witness = working.first().map(|&(a, b)| witness_for(a, b));
            if stop_at_first {
                working.truncate(1);
            }
            Ok(PairSearchReport { strategy, witness, working_pairs: working, pairs_tested: tested })
        }
    }
}

/// JSON export of a hull computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceExport {
    pub family: Family,
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub seed: Vec<String>,
    pub rounds: Vec<Vec<u32>>,
    pub converged_at: usize,
    pub hull_size: usize,
    pub is_hull_set: bool,
}

impl TraceExport {
    pub fn new(g: &SubspaceGraph, seed: &[u32], hull: &VertexSet, trace: &InfectionTrace) -> Result<TraceExport> {
        let seed = seed.iter().map(|&id| g.vertex(id).map(|s| s.canonical_form())).collect::<Result<Vec<_>>>()?;
        Ok(TraceExport {
            family: g.family(),
            q: g.q(),
            n: g.n(),
            k: g.k(),
            seed,
            rounds: trace.rounds.clone(),
            converged_at: trace.converged_at,
            hull_size: hull.len(),
            is_hull_set: hull.is_full(),
        })
    }
}
