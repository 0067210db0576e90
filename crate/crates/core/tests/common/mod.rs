#![allow(dead_code)]

use std::sync::Arc;

use p3hull::hull::{hull, hull_by_sweeps, interval, VertexSet};
use p3hull::{build_graph, make_field, BuildCaps, Family, FieldSpec, SubspaceGraph};

pub fn field(q: u64) -> Arc<FieldSpec> {
    Arc::new(make_field(q).unwrap())
}

pub fn graph(family: Family, q: u64, n: usize, k: usize) -> SubspaceGraph {
    build_graph(family, &field(q), n, k, BuildCaps::default()).unwrap()
}

pub fn kneser(q: u64, n: usize, k: usize) -> SubspaceGraph {
    graph(Family::QKneser, q, n, k)
}

pub fn grassmann(q: u64, n: usize, k: usize) -> SubspaceGraph {
    graph(Family::Grassmann, q, n, k)
}

/// Infected neighbors of `v` among `set`.
fn hits(g: &SubspaceGraph, set: &VertexSet, v: u32) -> usize {
    g.neighbors(v).unwrap().iter().filter(|&&w| set.contains(w)).count()
}

/// Checks the hull engine on one seed set; returns a description of the
/// first violated property.
pub fn check_hull_properties(g: &SubspaceGraph, seed: &VertexSet, subset: &VertexSet) -> Result<(), String> {
    let (h, trace) = hull(g, seed).unwrap();
    let (swept, sweeps) = hull_by_sweeps(g, seed).unwrap();
    if h != swept {
        return Err(format!("queue hull {} != sweep hull {}", h.len(), swept.len()));
    }
    if sweeps != trace.converged_at {
        return Err(format!("{sweeps} sweeps but {} traced rounds", trace.converged_at));
    }
    if !seed.is_subset(&h) {
        return Err("hull does not contain its seed".into());
    }
    let (again, again_trace) = hull(g, &h).unwrap();
    if again != h || again_trace.converged_at != 0 {
        return Err("hull is not idempotent".into());
    }
    if interval(g, &h).unwrap() != h {
        return Err("hull is not convex".into());
    }
    if subset.is_subset(seed) {
        let (hs, _) = hull(g, subset).unwrap();
        if !hs.is_subset(&h) {
            return Err("hull is not monotone".into());
        }
    }
    // Replay: round p consists of exactly the vertices outside I^{p-1}
    // with at least two neighbors inside it.
    let mut current = seed.clone();
    for (p, round) in trace.rounds.iter().enumerate() {
        let expected: Vec<u32> =
            (0..g.vertex_count() as u32).filter(|&v| !current.contains(v) && hits(g, &current, v) >= 2).collect();
        if &expected != round {
            return Err(format!("round {} does not replay", p + 1));
        }
        for &v in round {
            current.insert(v);
        }
    }
    if current != h {
        return Err("replayed rounds do not reach the hull".into());
    }
    Ok(())
}
