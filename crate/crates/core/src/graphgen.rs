//! Explicit q-Kneser and Grassmann graphs with CSR adjacency.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfq::{FieldElement, FieldSpec};
use crate::qcomb::gaussian_binomial;
use crate::subspace::{Subspace, SubspaceIter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Adjacent iff the intersection is the zero space.
    QKneser,
    /// Adjacent iff the intersection has dimension `k - 1`.
    Grassmann,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::QKneser => "qkneser",
            Family::Grassmann => "grassmann",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "qkneser" | "kneser" | "k" => Ok(Family::QKneser),
            "grassmann" | "j" => Ok(Family::Grassmann),
            other => Err(Error::Parse(format!("unknown graph family {other:?}"))),
        }
    }
}

impl Family {
    pub fn is_edge(self, k: usize, intersection_dim: usize) -> bool {
        match self {
            Family::QKneser => intersection_dim == 0,
            Family::Grassmann => intersection_dim + 1 == k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildCaps {
    pub max_vertices: u64,
    /// Cap on unordered vertex pairs examined while building.
    pub max_edge_checks: u64,
}

impl Default for BuildCaps {
    fn default() -> Self {
        BuildCaps { max_vertices: 2_000_000, max_edge_checks: 500_000_000 }
    }
}

/// `K_q(n,k)` or `J_q(n,k)` with vertices in enumeration order.
pub struct SubspaceGraph {
    family: Family,
    field: Arc<FieldSpec>,
    n: usize,
    k: usize,
    vertices: Vec<Subspace>,
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
    id_lookup: HashMap<Vec<FieldElement>, u32>,
    outside_regime: bool,
}

impl fmt::Debug for SubspaceGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SubspaceGraph({} q={} n={} k={}; {} vertices, {} edges)",
            self.family,
            self.q(),
            self.n,
            self.k,
            self.vertex_count(),
            self.edge_count()
        )
    }
}

/// Dimension-of-intersection tests between enumerated vertices.
///
/// Both variants reduce the rows of `w` modulo the RREF of `u` and take the
/// rank of the remainder, so `dim(u ∩ w) = k - rank`.
enum PairTester {
    /// `q = 2`, `n <= 64`: rows packed as bit masks.
    Binary {
        rows: Vec<Vec<u64>>,
        pivots: Vec<Vec<usize>>,
    },
    General,
}

impl PairTester {
    fn new(field: &FieldSpec, n: usize, vertices: &[Subspace]) -> PairTester {
        if field.order() == 2 && n <= 64 {
            let rows = vertices
                .iter()
                .map(|s| {
                    s.basis_vectors()
                        .map(|r| r.iter().enumerate().fold(0u64, |m, (c, x)| m | ((x.index() as u64) << c)))
                        .collect()
                })
                .collect();
            let pivots = vertices.iter().map(|s| s.pivots().to_vec()).collect();
            PairTester::Binary { rows, pivots }
        } else {
            PairTester::General
        }
    }

    fn intersection_dim(&self, vertices: &[Subspace], a: usize, b: usize) -> usize {
        match self {
            PairTester::Binary { rows, pivots } => {
                let (ua, pa) = (&rows[a], &pivots[a]);
                let mut residual = [0u64; 64];
                let k = rows[b].len();
                for (slot, &w) in residual.iter_mut().zip(&rows[b]) {
                    let mut w = w;
                    for (&p, &u) in pa.iter().zip(ua) {
                        if w >> p & 1 == 1 {
                            w ^= u;
                        }
                    }
                    *slot = w;
                }
                k - binary_rank(&mut residual[..k])
            }
            PairTester::General => vertices[a].intersection_dim(&vertices[b]).expect("same ambient space"),
        }
    }
}

fn binary_rank(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let pivot = rows[i..].iter().copied().max().unwrap_or(0);
        if pivot == 0 {
            break;
        }
        let pos = i + rows[i..].iter().position(|&r| r == pivot).unwrap();
        rows.swap(i, pos);
        let top = 63 - pivot.leading_zeros();
        for r in rows.iter_mut().skip(i + 1) {
            if *r >> top & 1 == 1 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

fn pivot_mask(s: &Subspace) -> u64 {
    s.pivots().iter().fold(0u64, |m, &p| m | 1 << p)
}

/// Builds `K_q(n,k)` or `J_q(n,k)`.
/// The hull constructions need `n >= 2k >= 2`; any `0 <= k <= n` is accepted and
/// The paper regime is `n >= 2k >= 2`; any `0 <= k <= n` is accepted and
/// [`SubspaceGraph::outside_hull_regime`] flags the difference.
pub fn build_graph(
    family: Family,
    field: &Arc<FieldSpec>,
    n: usize,
    k: usize,
    caps: BuildCaps,
) -> Result<SubspaceGraph> {
    if k > n {
        return Err(Error::InvalidParams(format!("need k <= n (got n = {n}, k = {k})")));
    }
    if n > 64 {
        return Err(Error::InvalidParams(format!("ambient dimension {n} exceeds 64")));
    }
    let q = u64::from(field.order());
    let count = gaussian_binomial(n as u32, k as u32, q);
    if count > caps.max_vertices.into() {
        return Err(Error::LimitExceeded(format!(
            "[{n},{k}]_{q} = {count} vertices exceeds the vertex cap {}",
            caps.max_vertices
        )));
    }
    let v = u64::try_from(&count).expect("bounded by the vertex cap");
    let checks = v * v.saturating_sub(1) / 2;
    if checks > caps.max_edge_checks {
        return Err(Error::LimitExceeded(format!(
            "{checks} pair checks exceeds the edge-check cap {}",
            caps.max_edge_checks
        )));
    }
    let outside_regime = !(n >= 2 * k && k >= 2);
    if outside_regime {
        log::warn!("building {family} q={q} n={n} k={k} outside the regime n >= 2k >= 4");
    }

    let vertices: Vec<Subspace> = SubspaceIter::new(field, n, k).collect();
    debug_assert_eq!(vertices.len() as u64, v);
    let tester = PairTester::new(field, n, &vertices);
    let masks: Vec<u64> = vertices.iter().map(pivot_mask).collect();

    // Disjoint pivot sets force a trivial intersection; a pivot overlap of
    // size t bounds the intersection dimension by t.
    let upper: Vec<Vec<u32>> = (0..vertices.len())
        .into_par_iter()
        .map(|a| {
            let mut row = Vec::new();
            for b in a + 1..vertices.len() {
                let overlap = (masks[a] & masks[b]).count_ones() as usize;
                let adjacent = match family {
                    Family::QKneser => overlap == 0 || tester.intersection_dim(&vertices, a, b) == 0,
                    Family::Grassmann => {
                        overlap + 1 >= k && family.is_edge(k, tester.intersection_dim(&vertices, a, b))
                    }
                };
                if adjacent {
                    row.push(b as u32);
                }
            }
            row
        })
        .collect();

    let (offsets, adjacency) = symmetric_csr(vertices.len(), &upper);
    let id_lookup = vertices.iter().enumerate().map(|(i, s)| (s.key().to_vec(), i as u32)).collect();
    Ok(SubspaceGraph { family, field: field.clone(), n, k, vertices, offsets, adjacency, id_lookup, outside_regime })
}

/// CSR arrays from upper-triangular neighbor lists; every list comes out
/// sorted because ids are visited in increasing order.
fn symmetric_csr(v: usize, upper: &[Vec<u32>]) -> (Vec<usize>, Vec<u32>) {
    let mut degree = vec![0usize; v];
    for (a, row) in upper.iter().enumerate() {
        degree[a] += row.len();
        for &b in row {
            degree[b as usize] += 1;
        }
    }
    let mut offsets = Vec::with_capacity(v + 1);
    offsets.push(0);
    for d in &degree {
        offsets.push(offsets.last().unwrap() + d);
    }
    let mut fill: Vec<usize> = offsets[..v].to_vec();
    let mut adjacency = vec![0u32; offsets[v]];
    for (a, row) in upper.iter().enumerate() {
        for &b in row {
            adjacency[fill[a]] = b;
            fill[a] += 1;
            adjacency[fill[b as usize]] = a as u32;
            fill[b as usize] += 1;
        }
    }
    (offsets, adjacency)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub vertex_count: usize,
    pub min: usize,
    pub max: usize,
    pub is_regular: bool,
    pub degree: Option<usize>,
    pub edge_count: u64,
}

impl SubspaceGraph {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn outside_hull_regime(&self) -> bool {
        self.outside_regime
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.adjacency.len() as u64 / 2
    }

    pub fn vertices(&self) -> &[Subspace] {
        &self.vertices
    }

    pub fn vertex(&self, id: u32) -> Result<&Subspace> {
        self.vertices.get(id as usize).ok_or(Error::IdOutOfRange { id: id.into(), len: self.vertices.len() })
    }

    pub fn id_of(&self, s: &Subspace) -> Option<u32> {
        if s.ambient() != self.n || s.dim() != self.k || s.field().order() != self.q() {
            return None;
        }
        self.id_lookup.get(s.key()).copied()
    }

    /// Sorted neighbor ids of `v`.
    pub fn neighbors(&self, v: u32) -> Result<&[u32]> {
        if (v as usize) < self.vertices.len() {
            Ok(self.adj(v))
        } else {
            Err(Error::IdOutOfRange { id: v.into(), len: self.vertices.len() })
        }
    }

    #[inline]
    pub(crate) fn adj(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj(v).len()
    }

    pub fn is_adjacent(&self, a: u32, b: u32) -> bool {
        self.adj(a).binary_search(&b).is_ok()
    }

    /// `|N(a) ∩ N(b)|` by a linear merge of the sorted lists.
    pub fn common_neighbor_count(&self, a: u32, b: u32) -> usize {
        let (x, y) = (self.adj(a), self.adj(b));
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vertices.len() as u32)
            .flat_map(move |u| self.adj(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn degree_report(&self) -> DegreeReport {
        let degrees = (0..self.vertices.len() as u32).map(|v| self.degree(v));
        let min = degrees.clone().min().unwrap_or(0);
        let max = degrees.max().unwrap_or(0);
        DegreeReport {
            vertex_count: self.vertex_count(),
            min,
            max,
            is_regular: min == max,
            degree: (min == max).then_some(min),
            edge_count: self.edge_count(),
        }
    }

    /// Vertex ids grouped by `dim(w ∩ u)`, classes `0..=k`.
    pub fn partition_by_intersection(&self, u: &Subspace) -> Result<Vec<Vec<u32>>> {
        if u.ambient() != self.n {
            return Err(Error::AmbientMismatch(u.ambient(), self.n));
        }
        let dims = self.vertices.par_iter().map(|w| u.intersection_dim(w)).collect::<Result<Vec<_>>>()?;
        let mut classes = vec![Vec::new(); self.k + 1];
        for (id, d) in dims.into_iter().enumerate() {
            classes[d].push(id as u32);
        }
        Ok(classes)
    }

    /// Edge list: `# family q n k` then one `u v` line per edge, `u < v`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# {} {} {} {}", self.family, self.q(), self.n, self.k)?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        out.flush()
    }

    pub fn vertex_map(&self) -> VertexMap {
        VertexMap {
            family: self.family,
            q: self.q(),
            n: self.n,
            k: self.k,
            vertices: self.vertices.iter().map(|s| s.canonical_form()).collect(),
        }
    }

    pub fn write_vertex_json<W: Write>(&self, out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(out, &self.vertex_map()).map_err(std::io::Error::other)
    }
}

/// Sidecar for an edge-list export: `vertices[id]` is the canonical form of
/// vertex `id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMap {
    pub family: Family,
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub vertices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub family: Family,
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub edges: Vec<(u32, u32)>,
}

impl EdgeList {
    /// Sorted adjacency lists over `vertex_count` vertices.
    pub fn adjacency(&self, vertex_count: usize) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); vertex_count];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        adj
    }
}

/// Reads the edge-list format written by [`SubspaceGraph::write_edge_list`].
pub fn read_edge_list<R: BufRead>(input: R) -> Result<EdgeList> {
    let mut lines = input.lines();
    let header =
        lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?.map_err(|e| Error::Parse(e.to_string()))?;
    let fields: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
    let [family, q, n, k] = fields[..] else {
        return Err(Error::Parse(format!("bad edge-list header {header:?}")));
    };
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad number {s:?}")));
    let mut edges = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (u, v) = line.split_once(' ').ok_or_else(|| Error::Parse(format!("bad edge line {line:?}")))?;
        edges.push((num(u)? as u32, num(v.trim())? as u32));
    }
    Ok(EdgeList { family: family.parse()?, q: num(q)? as u32, n: num(n)?, k: num(k)?, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfq::make_field;

    fn graph(family: Family, q: u64, n: usize, k: usize) -> SubspaceGraph {
        let field = Arc::new(make_field(q).unwrap());
        build_graph(family, &field, n, k, BuildCaps::default()).unwrap()
    }

    #[test]
    fn kneser_4_2_over_f2() {
        let g = graph(Family::QKneser, 2, 4, 2);
        let r = g.degree_report();
        assert_eq!(r.vertex_count, 35);
        assert_eq!(r.degree, Some(16));
        assert_eq!(r.edge_count, 280);
        let nb = g.neighbors(0).unwrap();
        assert_eq!(nb.len(), 16);
        let v = g.vertex(0).unwrap();
        for &w in nb {
            assert_eq!(v.intersection_dim(g.vertex(w).unwrap()).unwrap(), 0);
        }
    }

    #[test]
    fn kneser_5_2_over_f2() {
        let r = graph(Family::QKneser, 2, 5, 2).degree_report();
        assert_eq!((r.vertex_count, r.degree), (155, Some(112)));
    }

    #[test]
    fn grassmann_4_2_over_f2() {
        let g = graph(Family::Grassmann, 2, 4, 2);
        let r = g.degree_report();
        assert_eq!((r.vertex_count, r.degree), (35, Some(18)));
        let v = g.vertex(0).unwrap();
        for &w in g.neighbors(0).unwrap() {
            assert_eq!(v.intersection_dim(g.vertex(w).unwrap()).unwrap(), 1);
        }
    }

    #[test]
    fn lines_form_complete_graph() {
        for family in [Family::QKneser, Family::Grassmann] {
            let g = graph(family, 2, 3, 1);
            assert!(g.outside_hull_regime());
            assert_eq!(g.vertex_count(), 7);
            for v in 0..7 {
                let expected: Vec<u32> = (0..7).filter(|&w| w != v).collect();
                assert_eq!(g.neighbors(v).unwrap(), expected.as_slice());
            }
        }
    }

    #[test]
    fn neighbor_id_out_of_range() {
        let g = graph(Family::QKneser, 2, 4, 2);
        assert_eq!(g.neighbors(35), Err(Error::IdOutOfRange { id: 35, len: 35 }));
    }

    #[test]
    fn caps_are_enforced() {
        let field = Arc::new(make_field(2).unwrap());
        let r = build_graph(Family::QKneser, &field, 12, 6, BuildCaps::default());
        assert!(matches!(r, Err(Error::LimitExceeded(_))));
        let tight = BuildCaps { max_vertices: 1000, max_edge_checks: 100 };
        assert!(matches!(build_graph(Family::QKneser, &field, 4, 2, tight), Err(Error::LimitExceeded(_))));
    }

    #[test]
    fn binary_tester_agrees_with_general_rank() {
        let field = Arc::new(make_field(2).unwrap());
        let vertices: Vec<Subspace> = SubspaceIter::new(&field, 6, 3).collect();
        let tester = PairTester::new(&field, 6, &vertices);
        assert!(matches!(tester, PairTester::Binary { .. }));
        for a in (0..vertices.len()).step_by(37) {
            for b in 0..vertices.len() {
                assert_eq!(
                    tester.intersection_dim(&vertices, a, b),
                    vertices[a].intersection_dim(&vertices[b]).unwrap()
                );
            }
        }
    }

    #[test]
    fn partition_sizes() {
        let g = graph(Family::QKneser, 2, 4, 2);
        let field = g.field().clone();
        let u = Subspace::coordinate(&field, 4, &[0, 1]).unwrap();
        let sizes: Vec<usize> = g.partition_by_intersection(&u).unwrap().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![16, 18, 1]);
        let zero = Subspace::zero(&field, 4);
        let sizes: Vec<usize> = g.partition_by_intersection(&zero).unwrap().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![35, 0, 0]);
        let wrong = Subspace::zero(&field, 5);
        assert!(matches!(g.partition_by_intersection(&wrong), Err(Error::AmbientMismatch(..))));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = graph(Family::Grassmann, 3, 4, 2);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert!(buf.starts_with(b"# grassmann 3 4 2\n"));
        let parsed = read_edge_list(&buf[..]).unwrap();
        assert_eq!((parsed.family, parsed.q, parsed.n, parsed.k), (Family::Grassmann, 3, 4, 2));
        let adj = parsed.adjacency(g.vertex_count());
        for v in 0..g.vertex_count() as u32 {
            assert_eq!(adj[v as usize].as_slice(), g.neighbors(v).unwrap());
        }
        let mut json = Vec::new();
        g.write_vertex_json(&mut json).unwrap();
        let map: VertexMap = serde_json::from_slice(&json).unwrap();
        assert_eq!(map.vertices.len(), 130);
        let s = Subspace::parse(g.field(), 4, &map.vertices[17]).unwrap();
        assert_eq!(g.id_of(&s), Some(17));
    }
}
