//! Exact q-combinatorics over arbitrary-precision integers.
//!
//! Conventions: `[n]! = prod_{i=1}^{n} (q^i - 1)` with `[0]! = 1`, and the
//! Gaussian binomial `[n, k]` counts k-subspaces of an n-dimensional space,
//! so `[n, 0] = 1` and `[n, k] = 0` for `k > n`. Signed helpers extend this
//! with `0` for negative arguments, which is what the empty-sum cases of the
//! neighbor-count formula need.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative integer used for every count.
pub type QInt = BigUint;

/// Serializes a [`QInt`] as a decimal string.
pub fn serialize_decimal<S: serde::Serializer>(v: &QInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Parameters of the intersection-class counts.
///
/// `m` is the dimension of the fixed subspace `u(m)`, `k` the vertex
/// dimension, `i`/`j` intersection dimensions with `u(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountParams {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub i: u32,
    pub j: u32,
    pub q: u64,
}

impl CountParams {
    pub fn new(n: u32, m: u32, k: u32, i: u32, j: u32, q: u64) -> Self {
        CountParams { n, m, k, i, j, q }
    }
}

fn qpow(q: u64, e: i64) -> QInt {
    assert!(e >= 0, "negative exponent {e}");
    BigUint::from(q).pow(e as u32)
}

/// `[n]! = prod_{i=1}^{n} (q^i - 1)`.
pub fn q_factorial(n: u32, q: u64) -> QInt {
    (1..=n).fold(QInt::one(), |acc, i| acc * (qpow(q, i64::from(i)) - 1u32))
}

/// Gaussian binomial `[n, k]_q`.
///
/// Product form `prod_{t=0}^{k-1} (q^{n-t} - 1) / (q^{t+1} - 1)`; every
/// partial product is itself a Gaussian binomial, so each division is exact.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> QInt {
    gauss(i64::from(n), i64::from(k), q)
}

pub(crate) fn gauss(n: i64, k: i64, q: u64) -> QInt {
    assert!(q >= 2, "q must be at least 2");
    if n < 0 || k < 0 || k > n {
        return QInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = QInt::one();
    for t in 0..k {
        acc *= qpow(q, n - t) - 1u32;
        let (quot, rem) = acc.div_rem(&(qpow(q, t + 1) - 1u32));
        assert!(rem.is_zero(), "inexact Gaussian binomial step");
        acc = quot;
    }
    acc
}

/// Number of k-subspaces `w` with `dim(w ∩ u(m)) = i` for a fixed
/// m-subspace `u(m)`: `q^{(k-i)(m-i)} [m, i] [n-m, k-i]`.
pub fn count_a(p: &CountParams) -> QInt {
    a_signed(i64::from(p.n), i64::from(p.m), i64::from(p.k), i64::from(p.i), p.q)
}

fn a_signed(n: i64, m: i64, k: i64, i: i64, q: u64) -> QInt {
    let head = gauss(m, i, q);
    let tail = gauss(n - m, k - i, q);
    if head.is_zero() || tail.is_zero() {
        return QInt::zero();
    }
    qpow(q, (k - i) * (m - i)) * head * tail
}

fn check_dij_params(p: &CountParams) -> Result<()> {
    if p.i == p.j {
        return Err(Error::InvalidParams(format!("d_ij needs i != j (got i = j = {})", p.i)));
    }
    if p.i > p.k || p.j > p.k {
        return Err(Error::InvalidParams(format!(
            "intersection dims must be <= k = {} (got i = {}, j = {})",
            p.k, p.i, p.j
        )));
    }
    if p.k > p.n || p.m > p.n - p.k {
        return Err(Error::InvalidParams(format!("need 0 <= m <= n - k (got n = {}, m = {}, k = {})", p.n, p.m, p.k)));
    }
    if p.q < 2 {
        return Err(Error::InvalidParams(format!("q must be >= 2, got {}", p.q)));
    }
    Ok(())
}

/// Summation range `[b, B]` of the neighbor-count formula; empty when `b > B`.
pub fn dij_bounds(p: &CountParams) -> (i64, i64) {
    let (n, m, k, i, j) = (i64::from(p.n), i64::from(p.m), i64::from(p.k), i64::from(p.i), i64::from(p.j));
    let lo = 0.max(m + 2 * k - n - i - j);
    let hi = (m - i - j).min(k - i).min(k - j);
    (lo, hi)
}

/// `d_ij`: the number of neighbors in `K_q(n,k)` that a vertex `x` with
/// `dim(x ∩ u(m)) = i` has among vertices meeting `u(m)` in dimension `j`.
pub fn count_dij(p: &CountParams) -> Result<QInt> {
    check_dij_params(p)?;
    let q = p.q;
    let (n, m, k, i, j) = (i64::from(p.n), i64::from(p.m), i64::from(p.k), i64::from(p.i), i64::from(p.j));
    let (lo, hi) = dij_bounds(p);
    let mut sum = QInt::zero();
    for r in lo..=hi {
        let s = k - j - r;
        let first =
            qpow(q, r * (r - 1 + 2 * i) / 2) * gauss(m - i - j, r, q) * gauss(k - i, r, q) * q_factorial(r as u32, q);
        let second = qpow(q, s * (s + m - i)) * gauss(n - m - k + i, s, q);
        sum += first * second;
    }
    Ok(qpow(q, i * j) * gauss(m - i, j, q) * sum)
}

/// One summand of the neighbor-count decomposition `y = y1 ⊕ y2 ⊕ y3` with
/// `dim y2 = r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DijTerm {
    pub r: u32,
    #[serde(serialize_with = "serialize_decimal")]
    pub y2: QInt,
    #[serde(serialize_with = "serialize_decimal")]
    pub y3: QInt,
    /// `y1 * y2 * y3`.
    #[serde(serialize_with = "serialize_decimal")]
    pub term: QInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DijBreakdown {
    /// Choices of `y1 ⊆ u(m)` avoiding `x`; independent of `r`.
    #[serde(serialize_with = "serialize_decimal")]
    pub y1: QInt,
    pub terms: Vec<DijTerm>,
}

impl DijBreakdown {
    pub fn total(&self) -> QInt {
        self.terms.iter().map(|t| &t.term).sum()
    }
}

/// Per-`r` factors of `d_ij`, each computed by the counting route of the
/// decomposition rather than the simplified closed form:
///
/// * `|Y1| = a(u(m), x ∩ u(m), j, 0)`,
/// * `|Y2|` from the ordered-basis product divided by the overcount
///   `q^{r(r-1)/2} [r]! q^{jr}`,
/// * `|Y3| = a(S, u(m) + x, s, 0) / q^{s(j+r)}`, with `dim(u(m) + x) = m+k-i`.
pub fn dij_breakdown(p: &CountParams) -> Result<DijBreakdown> {
    check_dij_params(p)?;
    let q = p.q;
    let (n, m, k, i, j) = (i64::from(p.n), i64::from(p.m), i64::from(p.k), i64::from(p.i), i64::from(p.j));
    let y1 = a_signed(m, i, j, 0, q);
    let (lo, hi) = dij_bounds(p);
    let mut terms = Vec::new();
    for r in lo..=hi {
        let s = k - j - r;

        // Each factor is q^{i+j+2l} (q^{m-i-j-l} - 1)(q^{k-i-l} - 1) >= 0.
        let mut ordered = QInt::one();
        for l in 0..r {
            let plus = qpow(q, m + k - i) + qpow(q, i + j + 2 * l);
            let minus = qpow(q, m + l) + qpow(q, k + j + l);
            ordered *= plus - minus;
        }
        let overcount = qpow(q, r * (r - 1) / 2) * q_factorial(r as u32, q) * qpow(q, j * r);
        let (y2, rem) = ordered.div_rem(&overcount);
        assert!(rem.is_zero(), "inexact |Y2| division");

        let sum_dim = m + k - i;
        let (y3, rem) = a_signed(n, sum_dim, s, 0, q).div_rem(&qpow(q, s * (j + r)));
        assert!(rem.is_zero(), "inexact |Y3| division");

        let term = &y1 * &y2 * &y3;
        terms.push(DijTerm { r: r as u32, y2, y3, term });
    }
    Ok(DijBreakdown { y1, terms })
}

/// Common neighbors in `K_q(2k, k)` of two vertices meeting in dimension
/// `k - a`: `q^{k^2 - a(a+1)/2} [a]!`.
pub fn count_case2_common(k: u32, a: u32, q: u64) -> Result<QInt> {
    if a < 1 || a >= k {
        return Err(Error::InvalidParams(format!("need 1 <= a <= k - 1 (got k = {k}, a = {a})")));
    }
    let (k, a) = (i64::from(k), i64::from(a));
    Ok(qpow(q, k * k - a * (a + 1) / 2) * q_factorial(a as u32, q))
}

/// Degree of `K_q(n,k)`: `q^{k^2} [n-k, k]`.
pub fn kneser_degree(n: u32, k: u32, q: u64) -> QInt {
    if k > n {
        return QInt::zero();
    }
    qpow(q, i64::from(k) * i64::from(k)) * gaussian_binomial(n - k, k, q)
}

/// Edge count of `K_q(n,k)`: `q^{k^2} [n-k, k] [n, k] / 2`.
pub fn kneser_edge_count(n: u32, k: u32, q: u64) -> QInt {
    kneser_degree(n, k, q) * gaussian_binomial(n, k, q) / 2u32
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DI0Value {
    pub i: u32,
    #[serde(serialize_with = "serialize_decimal")]
    pub value: QInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DI0Report {
    pub n: u32,
    pub k: u32,
    pub q: u64,
    pub m: u32,
    pub values: Vec<DI0Value>,
    pub all_at_least_two: bool,
}

/// Evaluates `d_{i0}` with `m = k + 1` for `1 <= i <= k` and checks each is
/// at least 2.
pub fn check_d_i0_bound(n: u32, k: u32, q: u64) -> Result<DI0Report> {
    if n < 2 * k + 1 {
        return Err(Error::InvalidParams(format!("need n >= 2k + 1 (got n = {n}, k = {k})")));
    }
    let m = k + 1;
    let values = (1..=k)
        .map(|i| count_dij(&CountParams::new(n, m, k, i, 0, q)).map(|value| DI0Value { i, value }))
        .collect::<Result<Vec<_>>>()?;
    let two = QInt::from(2u32);
    let all_at_least_two = values.iter().all(|v| v.value >= two);
    Ok(DI0Report { n, k, q, m, values, all_at_least_two })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> QInt {
        QInt::from(v)
    }

    /// q-Pascal recurrence `[n,k] = [n-1,k-1] + q^k [n-1,k]`, used as an
    /// oracle independent of the product form.
    fn pascal(n: u32, k: u32, q: u64) -> QInt {
        let mut row = vec![QInt::one()];
        for nn in 1..=n {
            let mut next = vec![QInt::zero(); nn as usize + 1];
            for kk in 0..=nn as usize {
                let left = if kk > 0 { row[kk - 1].clone() } else { QInt::zero() };
                let up = row.get(kk).cloned().unwrap_or_default();
                next[kk] = left + qpow(q, kk as i64) * up;
            }
            row = next;
        }
        row.get(k as usize).cloned().unwrap_or_default()
    }

    #[test]
    fn q_factorial_values() {
        assert_eq!(q_factorial(0, 2), big(1));
        assert_eq!(q_factorial(2, 2), big(3));
        assert_eq!(q_factorial(3, 3), big(416));
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_binomial(5, 0, 2), big(1));
        assert_eq!(gaussian_binomial(0, 0, 2), big(1));
        assert_eq!(gaussian_binomial(4, 2, 2), big(35));
        assert_eq!(gaussian_binomial(2, 3, 7), big(0));
        assert_eq!(gaussian_binomial(6, 3, 2), big(1395));
        assert_eq!(gaussian_binomial(5, 2, 3), big(1210));
    }

    #[test]
    fn gaussian_matches_factorial_quotient_and_pascal() {
        for q in [2u64, 3, 4, 5, 7, 9] {
            for n in 0..=10u32 {
                for k in 0..=n {
                    let g = gaussian_binomial(n, k, q);
                    let quotient = q_factorial(n, q) / (q_factorial(k, q) * q_factorial(n - k, q));
                    assert_eq!(g, quotient);
                    assert_eq!(g, pascal(n, k, q));
                    assert_eq!(g, gaussian_binomial(n, n - k, q));
                }
            }
        }
    }

    #[test]
    fn gaussian_exceeds_u64() {
        let g = gaussian_binomial(40, 20, 5);
        assert!(g.bits() > 64);
        assert_eq!(g, pascal(40, 20, 5));
    }

    #[test]
    fn count_a_examples() {
        let a = |i| count_a(&CountParams::new(4, 2, 2, i, 0, 2));
        assert_eq!(a(2), big(1));
        assert_eq!(a(0), big(16));
        assert_eq!(a(1), big(18));
    }

    #[test]
    fn partition_identity() {
        for q in [2u64, 3, 4, 5] {
            for n in 1..=9u32 {
                for k in 0..=n {
                    for m in 0..=n {
                        let total: QInt = (0..=k).map(|i| count_a(&CountParams::new(n, m, k, i, 0, q))).sum();
                        assert_eq!(total, gaussian_binomial(n, k, q), "q={q} n={n} k={k} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn dij_examples() {
        let d = |n, m, k, i, j| count_dij(&CountParams::new(n, m, k, i, j, 2)).unwrap();
        assert_eq!(d(4, 2, 2, 1, 2), big(0));
        assert_eq!(d(4, 2, 2, 2, 0), big(16));
        assert_eq!(d(5, 3, 2, 1, 0), big(48));
        assert_eq!(d(4, 2, 2, 2, 0), count_a(&CountParams::new(4, 2, 2, 0, 0, 2)));
    }

    #[test]
    fn dij_errors() {
        assert!(matches!(count_dij(&CountParams::new(4, 2, 2, 1, 1, 2)), Err(Error::InvalidParams(_))));
        assert!(matches!(count_dij(&CountParams::new(4, 3, 2, 1, 0, 2)), Err(Error::InvalidParams(_))));
        assert!(matches!(count_dij(&CountParams::new(4, 2, 2, 3, 0, 2)), Err(Error::InvalidParams(_))));
        assert!(dij_breakdown(&CountParams::new(4, 2, 2, 0, 0, 2)).is_err());
    }

    #[test]
    fn breakdown_examples() {
        let b = dij_breakdown(&CountParams::new(5, 3, 2, 1, 0, 2)).unwrap();
        assert_eq!(b.y1, big(1));
        assert_eq!(b.terms.len(), 1);
        assert_eq!(b.terms[0].r, 1);
        assert_eq!(b.total(), big(48));

        let b = dij_breakdown(&CountParams::new(4, 2, 2, 1, 2, 2)).unwrap();
        assert!(b.terms.is_empty());

        let b = dij_breakdown(&CountParams::new(4, 2, 2, 2, 0, 2)).unwrap();
        assert_eq!(b.terms.len(), 1);
        assert_eq!(b.terms[0].r, 0);
        assert_eq!(b.terms[0].term, big(16));
    }

    #[test]
    fn breakdown_sums_to_closed_form() {
        for q in [2u64, 3, 4, 5] {
            for n in 2..=10u32 {
                for k in 1..=n / 2 {
                    for m in 0..=n - k {
                        for i in 0..=k {
                            for j in 0..=k {
                                if i == j {
                                    continue;
                                }
                                let p = CountParams::new(n, m, k, i, j, q);
                                let b = dij_breakdown(&p).unwrap();
                                assert_eq!(b.total(), count_dij(&p).unwrap(), "{p:?}");
                                let (lo, hi) = dij_bounds(&p);
                                assert_eq!(b.terms.is_empty(), lo > hi);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dij_is_not_symmetric() {
        let p = CountParams::new(5, 3, 2, 1, 0, 2);
        let swapped = CountParams { i: 0, j: 1, ..p };
        assert_ne!(count_dij(&p).unwrap(), count_dij(&swapped).unwrap());
    }

    #[test]
    fn case2_common_values() {
        assert_eq!(count_case2_common(2, 1, 2).unwrap(), big(8));
        assert_eq!(count_case2_common(2, 1, 3).unwrap(), big(54));
        assert_eq!(count_case2_common(3, 2, 2).unwrap(), big(192));
        assert!(count_case2_common(2, 0, 2).is_err());
        assert!(count_case2_common(2, 2, 2).is_err());
    }

    #[test]
    fn kneser_degree_values() {
        assert_eq!(kneser_degree(4, 2, 2), big(16));
        assert_eq!(kneser_degree(5, 2, 2), big(112));
        assert_eq!(kneser_degree(6, 3, 2), big(512));
        assert_eq!(kneser_edge_count(4, 2, 2), big(280));
    }

    #[test]
    fn d_i0_bound() {
        let r = check_d_i0_bound(5, 2, 2).unwrap();
        assert!(r.all_at_least_two);
        assert_eq!(r.values[0], DI0Value { i: 1, value: big(48) });
        assert!(check_d_i0_bound(7, 3, 2).unwrap().all_at_least_two);
        assert!(matches!(check_d_i0_bound(4, 2, 2), Err(Error::InvalidParams(_))));
    }
}
