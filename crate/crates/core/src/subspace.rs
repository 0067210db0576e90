//! Subspaces of `F_q^n` in reduced row echelon form.
//!
//! A [`Subspace`] stores its unique RREF basis, so structural equality is
//! equality of points of the Grassmannian. Enumeration walks pivot-column
//! sets in lexicographic order and, within a pivot set, the free entries
//! read row-major as a base-q odometer (last entry fastest). The position in
//! that order is the vertex id used by the graph builders.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfq::{FieldElement, FieldSpec};
use crate::qcomb::gaussian_binomial;

/// Default cap on the number of subspaces a single enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 2_000_000;

/// Row-major matrix over `F_q`.
#[derive(Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
    field: Arc<FieldSpec>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[q={}; {}]", self.field.order(), format_rows(self))
    }
}

impl Matrix {
    pub fn new(field: &Arc<FieldSpec>, rows: usize, cols: usize, entries: Vec<FieldElement>) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidParams(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        if let Some(bad) = entries.iter().find(|e| e.index() >= field.order() as usize) {
            return Err(Error::InvalidParams(format!("entry {bad} out of range for F_{}", field.order())));
        }
        Ok(Matrix { rows, cols, entries, field: field.clone() })
    }

    pub fn zeros(field: &Arc<FieldSpec>, rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, entries: vec![FieldElement::ZERO; rows * cols], field: field.clone() }
    }

    /// Builds a matrix from rows of element indices.
    pub fn from_index_rows(field: &Arc<FieldSpec>, cols: usize, rows: &[Vec<u32>]) -> Result<Matrix> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::InvalidParams(format!(
                    "row of length {} in a matrix with {cols} columns",
                    row.len()
                )));
            }
            for &v in row {
                entries.push(field.element(v)?);
            }
        }
        Ok(Matrix { rows: rows.len(), cols, entries, field: field.clone() })
    }

    pub fn from_vectors(field: &Arc<FieldSpec>, cols: usize, vectors: &[Vec<FieldElement>]) -> Result<Matrix> {
        let mut entries = Vec::with_capacity(vectors.len() * cols);
        for v in vectors {
            if v.len() != cols {
                return Err(Error::AmbientMismatch(v.len(), cols));
            }
            entries.extend_from_slice(v);
        }
        Matrix::new(field, vectors.len(), cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.reduce().len()
    }

    /// In-place reduction to RREF, dropping zero rows. Returns pivot columns.
    fn reduce(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..cols {
            if lead == self.rows {
                break;
            }
            let Some(src) = (lead..self.rows).find(|&r| !self.entries[r * cols + c].is_zero()) else {
                continue;
            };
            if src != lead {
                for t in 0..cols {
                    self.entries.swap(src * cols + t, lead * cols + t);
                }
            }
            let inv = f.inv_nonzero(self.entries[lead * cols + c]);
            for t in c..cols {
                let e = &mut self.entries[lead * cols + t];
                *e = f.mul(*e, inv);
            }
            for r in 0..self.rows {
                if r == lead {
                    continue;
                }
                let factor = self.entries[r * cols + c];
                if factor.is_zero() {
                    continue;
                }
                for t in c..cols {
                    let sub = f.mul(factor, self.entries[lead * cols + t]);
                    let e = &mut self.entries[r * cols + t];
                    *e = f.sub(*e, sub);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        self.entries.truncate(lead * cols);
        self.rows = lead;
        pivots
    }
}

/// A subspace of `F_q^n`, stored as its canonical RREF basis.
#[derive(Clone)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.basis.field.order() == other.basis.field.order()
            && self.basis.cols == other.basis.cols
            && self.basis.entries == other.basis.entries
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.basis.cols.hash(state);
        self.basis.entries.hash(state);
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(q={}, n={}, [{}])", self.basis.field.order(), self.ambient(), self.canonical_form())
    }
}

/// Canonical serialized form: rows of space-separated element indices
/// joined by `;`. The zero space serializes as the empty string.
impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rows(&self.basis))
    }
}

fn format_rows(m: &Matrix) -> String {
    (0..m.rows)
        .map(|r| m.row(r).iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

impl Subspace {
    /// Row space of `m` in canonical form.
    pub fn from_matrix(m: &Matrix) -> Subspace {
        let mut basis = m.clone();
        let pivots = basis.reduce();
        Subspace { basis, pivots }
    }

    /// Span of the given vectors (each of length `ambient`).
    pub fn span(field: &Arc<FieldSpec>, ambient: usize, vectors: &[Vec<FieldElement>]) -> Result<Subspace> {
        Ok(Subspace::from_matrix(&Matrix::from_vectors(field, ambient, vectors)?))
    }

    pub fn zero(field: &Arc<FieldSpec>, ambient: usize) -> Subspace {
        Subspace { basis: Matrix::zeros(field, 0, ambient), pivots: Vec::new() }
    }

    pub fn whole(field: &Arc<FieldSpec>, ambient: usize) -> Subspace {
        let all: Vec<usize> = (0..ambient).collect();
        Subspace::coordinate(field, ambient, &all).expect("indices in range")
    }

    /// Span of the coordinate vectors `e_i` for the given 0-based indices.
    pub fn coordinate(field: &Arc<FieldSpec>, ambient: usize, indices: &[usize]) -> Result<Subspace> {
        if let Some(&index) = indices.iter().find(|&&i| i >= ambient) {
            return Err(Error::IndexOutOfRange { index, ambient });
        }
        let vectors: Vec<Vec<FieldElement>> = indices.iter().map(|&i| unit_vector(ambient, i)).collect();
        Subspace::span(field, ambient, &vectors)
    }

    /// Parses the canonical serialized form; the rows need not already be
    /// in RREF. The empty string is the zero space.
    pub fn parse(field: &Arc<FieldSpec>, ambient: usize, text: &str) -> Result<Subspace> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Subspace::zero(field, ambient));
        }
        let mut rows = Vec::new();
        for row in text.split(';') {
            let values = row
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad field element {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if values.len() != ambient {
                return Err(Error::Parse(format!("row {row:?} has {} entries, expected {ambient}", values.len())));
            }
            rows.push(values);
        }
        let m = Matrix::from_index_rows(field, ambient, &rows).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Subspace::from_matrix(&m))
    }

    pub fn canonical_form(&self) -> String {
        self.to_string()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.basis.field
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical RREF entries, row-major; the identity key of the subspace.
    pub fn key(&self) -> &[FieldElement] {
        &self.basis.entries
    }

    pub fn basis_vectors(&self) -> impl Iterator<Item = &[FieldElement]> {
        (0..self.dim()).map(move |r| self.basis.row(r))
    }

    fn compatible(&self, other: &Subspace) -> Result<()> {
        if self.ambient() != other.ambient() {
            return Err(Error::AmbientMismatch(self.ambient(), other.ambient()));
        }
        let (a, b) = (self.field().order(), other.field().order());
        if a != b {
            return Err(Error::FieldMismatch(a, b));
        }
        Ok(())
    }

    /// Reduces `v` modulo this subspace: clears every pivot column using the
    /// RREF rows. The result is zero iff `v` lies in the subspace.
    pub fn reduce_vector(&self, v: &mut [FieldElement]) {
        let f = self.field();
        for (r, &p) in self.pivots.iter().enumerate() {
            let factor = v[p];
            if factor.is_zero() {
                continue;
            }
            for (x, &b) in v.iter_mut().zip(self.basis.row(r)) {
                *x = f.sub(*x, f.mul(factor, b));
            }
        }
    }

    pub fn contains_vector(&self, v: &[FieldElement]) -> bool {
        let mut w = v.to_vec();
        self.reduce_vector(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// `dim(self ∩ other)`, as `dim other - rank(other reduced modulo self)`.
    pub fn intersection_dim(&self, other: &Subspace) -> Result<usize> {
        self.compatible(other)?;
        let mut residual = other.basis.clone();
        for r in 0..residual.rows {
            let start = r * residual.cols;
            self.reduce_vector(&mut residual.entries[start..start + residual.cols]);
        }
        Ok(other.dim() - residual.rank())
    }

    /// The subspace sum `self + other`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        let mut entries = self.basis.entries.clone();
        entries.extend_from_slice(&other.basis.entries);
        let m = Matrix { rows: self.dim() + other.dim(), cols: self.ambient(), entries, field: self.field().clone() };
        Ok(Subspace::from_matrix(&m))
    }

    /// `self ∩ other` by the Zassenhaus algorithm: reduce `[[U, U], [W, 0]]`;
    /// rows whose left half vanishes span the intersection in the right half.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        let n = self.ambient();
        let mut entries = Vec::with_capacity((self.dim() + other.dim()) * 2 * n);
        for row in self.basis_vectors() {
            entries.extend_from_slice(row);
            entries.extend_from_slice(row);
        }
        for row in other.basis_vectors() {
            entries.extend_from_slice(row);
            entries.extend(std::iter::repeat_n(FieldElement::ZERO, n));
        }
        let mut m = Matrix { rows: self.dim() + other.dim(), cols: 2 * n, entries, field: self.field().clone() };
        m.reduce();
        let vectors: Vec<Vec<FieldElement>> = (0..m.rows)
            .map(|r| m.row(r))
            .filter(|row| row[..n].iter().all(|x| x.is_zero()))
            .map(|row| row[n..].to_vec())
            .collect();
        Subspace::span(self.field(), n, &vectors)
    }

    /// True iff `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        Ok(self.intersection_dim(other)? == other.dim())
    }
}

/// Coefficients `x` with `sum_j x_j vectors[j] = target`, or `None` when
/// `target` is outside their span. Free coefficients are set to zero.
pub fn solve_combination(
    field: &Arc<FieldSpec>,
    vectors: &[Vec<FieldElement>],
    target: &[FieldElement],
) -> Option<Vec<FieldElement>> {
    let n = target.len();
    let r = vectors.len();
    // Columns are the given vectors, plus the target as the last column.
    let mut entries = Vec::with_capacity(n * (r + 1));
    for row in 0..n {
        entries.extend(vectors.iter().map(|v| v[row]));
        entries.push(target[row]);
    }
    let mut m = Matrix { rows: n, cols: r + 1, entries, field: field.clone() };
    let pivots = m.reduce();
    if pivots.last() == Some(&r) {
        return None;
    }
    let mut x = vec![FieldElement::ZERO; r];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = m.get(row, r);
    }
    Some(x)
}

pub fn unit_vector(ambient: usize, index: usize) -> Vec<FieldElement> {
    let mut v = vec![FieldElement::ZERO; ambient];
    v[index] = FieldElement::ONE;
    v
}

/// Lazy enumeration of all k-subspaces of `F_q^n` in vertex-id order.
pub struct SubspaceIter {
    field: Arc<FieldSpec>,
    n: usize,
    k: usize,
    pivots: Option<Vec<usize>>,
    free: Vec<(usize, usize)>,
    digits: Vec<u8>,
}

impl SubspaceIter {
    pub fn new(field: &Arc<FieldSpec>, n: usize, k: usize) -> SubspaceIter {
        let pivots = (k <= n).then(|| (0..k).collect::<Vec<_>>());
        let mut it = SubspaceIter { field: field.clone(), n, k, pivots, free: Vec::new(), digits: Vec::new() };
        it.reset_free();
        it
    }

    fn reset_free(&mut self) {
        self.free.clear();
        if let Some(pivots) = &self.pivots {
            for (r, &p) in pivots.iter().enumerate() {
                for c in p + 1..self.n {
                    if !pivots.contains(&c) {
                        self.free.push((r, c));
                    }
                }
            }
        }
        self.digits = vec![0; self.free.len()];
    }

    fn current(&self, pivots: &[usize]) -> Subspace {
        let mut entries = vec![FieldElement::ZERO; self.k * self.n];
        for (r, &p) in pivots.iter().enumerate() {
            entries[r * self.n + p] = FieldElement::ONE;
        }
        for (&(r, c), &d) in self.free.iter().zip(&self.digits) {
            entries[r * self.n + c] = FieldElement(d);
        }
        Subspace {
            basis: Matrix { rows: self.k, cols: self.n, entries, field: self.field.clone() },
            pivots: pivots.to_vec(),
        }
    }

    fn advance(&mut self) {
        let q = self.field.order() as u16;
        for d in self.digits.iter_mut().rev() {
            if (*d as u16) + 1 < q {
                *d += 1;
                return;
            }
            *d = 0;
        }
        let n = self.n;
        let k = self.k;
        let next = self.pivots.take().and_then(|mut p| next_combination(&mut p, n, k).then_some(p));
        self.pivots = next;
        self.reset_free();
    }
}

/// Advances `comb` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(comb: &mut [usize], n: usize, k: usize) -> bool {
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for t in i + 1..k {
                comb[t] = comb[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        let pivots = self.pivots.clone()?;
        let out = self.current(&pivots);
        self.advance();
        Some(out)
    }
}

/// All k-subspaces of `F_q^n` in the deterministic vertex-id order.
pub fn enumerate_subspaces(n: usize, k: usize, field: &Arc<FieldSpec>) -> Result<Vec<Subspace>> {
    enumerate_subspaces_capped(n, k, field, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_subspaces_capped(n: usize, k: usize, field: &Arc<FieldSpec>, cap: u64) -> Result<Vec<Subspace>> {
    let count = gaussian_binomial(n as u32, k as u32, u64::from(field.order()));
    if count > cap.into() {
        return Err(Error::LimitExceeded(format!(
            "[{n},{k}]_{} = {count} subspaces exceeds the enumeration cap {cap}",
            field.order()
        )));
    }
    Ok(SubspaceIter::new(field, n, k).collect())
}
