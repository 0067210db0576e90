//! Finite fields `F_q` for prime powers `q`.
//!
//! An element of `F_{p^e}` is a polynomial `c_0 + c_1 x + ... + c_{e-1} x^{e-1}`
//! over `F_p`, stored as its index `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`.
//! Multiplication is taken modulo the lexicographically smallest monic
//! irreducible polynomial of degree `e`, so a given `q` always produces the
//! same tables. All arithmetic goes through precomputed `q x q` tables.

use std::fmt;

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const DEFAULT_TABLE_BOUND: u32 = 256;

/// An element of `F_q`, identified by its index in `[0, q)`.
///
/// Index 0 is the additive identity and index 1 the multiplicative identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct FieldElement(pub(crate) u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
}

/// The field of order `q = p^e` together with its arithmetic tables.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u8>,
    sub: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish_non_exhaustive()
    }
}

/// Builds `F_q` with the default table bound.
pub fn make_field(q: u64) -> Result<FieldSpec> {
    make_field_with_bound(q, DEFAULT_TABLE_BOUND)
}

/// Builds `F_q`, refusing orders above `bound` (itself capped at 256).
pub fn make_field_with_bound(q: u64, bound: u32) -> Result<FieldSpec> {
    if q < 2 {
        return Err(Error::InvalidParams(format!("field order must be >= 2, got {q}")));
    }
    let (p, e) = prime_power_decomposition(q).ok_or(Error::NotPrimePower(q))?;
    let bound = bound.min(DEFAULT_TABLE_BOUND);
    if q > u64::from(bound) {
        return Err(Error::LimitExceeded(format!("field order {q} exceeds the table bound {bound}")));
    }
    let (p, q) = (p as u32, q as u32);
    let modulus = find_irreducible(p, e);
    Ok(FieldSpec::with_modulus(p, e, q, modulus))
}

/// Returns `(p, e)` with `q = p^e` and `p` prime, or `None`.
pub fn prime_power_decomposition(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = smallest_prime_factor(q);
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 1;
    }
    n
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

/// The lexicographically smallest monic irreducible polynomial of degree `e`
/// over `F_p`, coefficients listed constant term first and compared in that
/// order. For `e = 1` this is `x`.
///
/// Panics if `p` is not prime or `e == 0`.
pub fn find_irreducible(p: u32, e: u32) -> Vec<u32> {
    assert!(is_prime(u64::from(p)), "{p} is not prime");
    assert!(e >= 1, "degree must be at least 1");
    let e = e as usize;
    let total = (p as u64).pow(e as u32);
    for t in 0..total {
        // c_0 is the most significant digit of t, c_{e-1} the least.
        let mut poly = vec![0u32; e + 1];
        let mut rest = t;
        for i in (0..e).rev() {
            poly[i] = (rest % u64::from(p)) as u32;
            rest /= u64::from(p);
        }
        poly[e] = 1;
        if is_irreducible(p, &poly) {
            return poly;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_{p}")
}

/// Irreducibility over `F_p` by trial division against every monic
/// polynomial of degree `1..=deg/2`.
pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let poly = trim(poly.to_vec());
    let deg = match poly.len() {
        0 => return false,
        n => n - 1,
    };
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for t in 0..count {
            let mut divisor = vec![0u32; d + 1];
            let mut rest = t;
            for c in divisor.iter_mut().take(d) {
                *c = (rest % u64::from(p)) as u32;
                rest /= u64::from(p);
            }
            divisor[d] = 1;
            if poly_rem(p, &poly, &divisor).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn trim(mut poly: Vec<u32>) -> Vec<u32> {
    while poly.last() == Some(&0) {
        poly.pop();
    }
    poly
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let sub = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

impl FieldSpec {
    fn with_modulus(p: u32, e: u32, q: u32, modulus: Vec<u32>) -> FieldSpec {
        let qs = q as usize;
        let digits: Vec<Vec<u32>> = (0..q).map(|a| to_digits(a, p, e)).collect();
        let from = |d: &[u32]| -> u8 { from_digits(d, p) as u8 };

        let mut add = vec![0u8; qs * qs];
        let mut sub = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        let mut neg = vec![0u8; qs];
        for a in 0..qs {
            let da = &digits[a];
            neg[a] = from(&da.iter().map(|&c| (p - c) % p).collect::<Vec<_>>());
            for b in 0..qs {
                let db = &digits[b];
                let s: Vec<u32> = da.iter().zip(db).map(|(x, y)| (x + y) % p).collect();
                let d: Vec<u32> = da.iter().zip(db).map(|(x, y)| (x + p - y) % p).collect();
                add[a * qs + b] = from(&s);
                sub[a * qs + b] = from(&d);

                let mut prod = vec![0u32; 2 * e as usize - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = ((prod[i + j] as u64 + *x as u64 * *y as u64) % p as u64) as u32;
                    }
                }
                let mut r = poly_rem(p, &prod, &modulus);
                r.resize(e as usize, 0);
                mul[a * qs + b] = from(&r);
            }
        }
        let mut inv = vec![0u8; qs];
        for a in 1..qs {
            inv[a] = (1..qs).find(|&b| mul[a * qs + b] == 1).expect("field has inverses") as u8;
        }
        FieldSpec { p, e, q, modulus, add, sub, mul, neg, inv }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Defining polynomial, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The element with the given index.
    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.q {
            Ok(FieldElement(index as u8))
        } else {
            Err(Error::InvalidParams(format!("element index {index} out of range for F_{}", self.q)))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(|i| FieldElement(i as u8))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(|i| FieldElement(i as u8))
    }

    #[inline]
    fn at(&self, a: FieldElement, b: FieldElement) -> usize {
        a.index() * self.q as usize + b.index()
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add[self.at(a, b)])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.sub[self.at(a, b)])
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul[self.at(a, b)])
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.index()])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(FieldElement(self.inv[a.index()]))
        }
    }

    /// Inverse of a value already known to be nonzero.
    #[inline]
    pub(crate) fn inv_nonzero(&self, a: FieldElement) -> FieldElement {
        debug_assert!(!a.is_zero());
        FieldElement(self.inv[a.index()])
    }

    /// Applies `op`; binary operations require `b`.
    pub fn apply(&self, op: FieldOp, a: FieldElement, b: Option<FieldElement>) -> Result<FieldElement> {
        self.check(a)?;
        if let Some(b) = b {
            self.check(b)?;
        }
        let need_b = || b.ok_or_else(|| Error::InvalidParams(format!("{op:?} needs a second operand")));
        match op {
            FieldOp::Add => Ok(self.add(a, need_b()?)),
            FieldOp::Sub => Ok(self.sub(a, need_b()?)),
            FieldOp::Mul => Ok(self.mul(a, need_b()?)),
            FieldOp::Neg => Ok(self.neg(a)),
            FieldOp::Inv => self.inv(a),
        }
    }

    fn check(&self, a: FieldElement) -> Result<()> {
        if (a.0 as u32) < self.q {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("element index {} out of range for F_{}", a.0, self.q)))
        }
    }
}

fn to_digits(mut a: u32, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}
