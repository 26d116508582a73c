//! Table-driven arithmetic in `F_q` for prime powers `q <= 64`.
//!
//! Elements are indices in `[0, q)`. For `q = p^m` the index
//! `c_0 + c_1 p + ... + c_{m-1} p^{m-1}` encodes the polynomial
//! `c_0 + c_1 x + ... + c_{m-1} x^{m-1}` modulo a fixed irreducible.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_FIELD_ORDER: u64 = 64;

/// An element of a finite field, identified by its index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct FieldElem(pub u8);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    p: u8,
    m: u8,
    q: u8,
    /// Modulus coefficients, lowest degree first, monic of degree `m`.
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) [modulus {:?}]", self.q, self.modulus)
    }
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let mut r = q;
    let mut m = 0;
    while r.is_multiple_of(p) {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

fn digits(mut x: usize, p: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for d in out.iter_mut() {
        *d = x % p;
        x /= p;
    }
    out
}

fn undigits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic polynomial `b` over `F_p`.
fn poly_rem(a: &[usize], b: &[usize], p: usize) -> Vec<usize> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                r[i + shift] = (r[i + shift] + p * p - lead * c % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn is_irreducible(f: &[usize], p: usize) -> bool {
    let m = f.len() - 1;
    for deg in 1..=m / 2 {
        for low in 0..p.pow(deg as u32) {
            let mut g = digits(low, p, deg);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Builds `F_q`. For `q = p^m` with `m > 1` the modulus is the monic
    /// irreducible of degree `m` whose coefficient vector, read from the
    /// highest degree down, is lexicographically least.
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_FIELD_ORDER {
            return Err(Error::NotPrimePower(q));
        }
        let (p, m) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let (p, m, qn) = (p as usize, m as usize, q as usize);
        let modulus: Vec<usize> = if m == 1 {
            vec![0, 1]
        } else {
            (0..p.pow(m as u32))
                .map(|low| {
                    let mut f = digits(low, p, m);
                    f.push(1);
                    f
                })
                .find(|f| is_irreducible(f, p))
                .expect("an irreducible polynomial exists in every degree")
        };

        let mut add = vec![0u8; qn * qn];
        let mut mul = vec![0u8; qn * qn];
        for a in 0..qn {
            let da = digits(a, p, m);
            for b in 0..qn {
                let db = digits(b, p, m);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * qn + b] = undigits(&sum, p) as u8;
                let mut prod = vec![0usize; 2 * m - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let r = if m == 1 { vec![prod[0] % p] } else { poly_rem(&prod, &modulus, p) };
                mul[a * qn + b] = undigits(&r, p) as u8;
            }
        }
        let mut neg = vec![0u8; qn];
        let mut inv = vec![0u8; qn];
        for a in 0..qn {
            neg[a] = (0..qn).find(|&b| add[a * qn + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..qn).find(|&b| mul[a * qn + b] == 1).unwrap() as u8;
            }
        }
        let field = Field {
            p: p as u8,
            m: m as u8,
            q: q as u8,
            modulus: modulus.iter().map(|&c| c as u8).collect(),
            add,
            mul,
            neg,
            inv,
        };
        if q <= 16 {
            assert!(field.satisfies_axioms(), "field tables for q = {q} are inconsistent");
        }
        Ok(field)
    }

    pub fn q(&self) -> u64 {
        self.q as u64
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.m as u32
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q).map(FieldElem)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p as i64) as u8)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add[a.index() * self.q as usize + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul[a.index() * self.q as usize + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.index()])
    }

    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        (!a.is_zero()).then(|| FieldElem(self.inv[a.index()]))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        let mut acc = FieldElem::ONE;
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }

    /// Whether `a = b^2` for some `b` in the field.
    pub fn is_square(&self, a: FieldElem) -> bool {
        if a.is_zero() || self.p == 2 {
            return true;
        }
        self.pow(a, (self.q() - 1) / 2) == FieldElem::ONE
    }

    /// Absolute trace `a + a^p + ... + a^{p^{m-1}}`, an element of the prime field.
    pub fn abs_trace(&self, a: FieldElem) -> FieldElem {
        let mut acc = FieldElem::ZERO;
        let mut x = a;
        for _ in 0..self.m {
            acc = self.add(acc, x);
            x = self.pow(x, self.p as u64);
        }
        debug_assert!(acc.0 < self.p);
        acc
    }

    fn satisfies_axioms(&self) -> bool {
        let els: Vec<FieldElem> = self.elements().collect();
        for &a in &els {
            if self.add(a, FieldElem::ZERO) != a || self.mul(a, FieldElem::ONE) != a {
                return false;
            }
            if !a.is_zero() && self.mul(a, self.inv(a).unwrap()) != FieldElem::ONE {
                return false;
            }
            for &b in &els {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
                for &c in &els {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c))
                        || self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c))
                        || self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field() {
        let f = Field::new(5).unwrap();
        assert_eq!(f.mul(FieldElem(2), FieldElem(3)), FieldElem(1));
        assert_eq!(f.abs_trace(FieldElem(2)), FieldElem(2));
    }

    #[test]
    fn gf4() {
        let f = Field::new(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let alpha = FieldElem(2);
        assert_eq!(f.mul(alpha, alpha), f.add(alpha, FieldElem::ONE));
        assert_eq!(f.abs_trace(alpha), FieldElem::ONE);
        assert!(f.elements().all(|a| f.is_square(a)));
    }

    #[test]
    fn gf8_modulus_is_least() {
        let f = Field::new(8).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn rejects_non_prime_powers() {
        for q in [0, 1, 6, 10, 12, 128] {
            assert!(matches!(Field::new(q), Err(Error::NotPrimePower(_))));
        }
        assert!(Field::new(64).is_ok());
        assert!(Field::new(49).is_ok());
    }

    #[test]
    fn squares() {
        let f = Field::new(3).unwrap();
        assert!(!f.is_square(FieldElem(2)));
        assert!(f.is_square(FieldElem(0)));
        for q in [3u64, 5, 7, 9, 11, 13, 25, 27] {
            let f = Field::new(q).unwrap();
            let n = f.elements().filter(|&a| f.is_square(a)).count() as u64;
            assert_eq!(n, q.div_ceil(2), "q = {q}");
            let brute = f
                .elements()
                .filter(|&a| f.elements().any(|b| f.mul(b, b) == a))
                .count() as u64;
            assert_eq!(n, brute);
        }
    }

    #[test]
    fn exhaustive_small_fields() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Field::new(q).unwrap();
            let p = f.characteristic();
            for a in f.elements() {
                if let Some(ai) = f.inv(a) {
                    assert_eq!(f.mul(a, ai), FieldElem::ONE);
                }
                for b in f.elements() {
                    // Frobenius is additive.
                    assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
                    // Trace is additive.
                    assert_eq!(f.abs_trace(f.add(a, b)), f.add(f.abs_trace(a), f.abs_trace(b)));
                }
                for c in 0..p {
                    let c = f.from_int(c as i64);
                    assert_eq!(f.abs_trace(f.mul(c, a)), f.mul(c, f.abs_trace(a)));
                }
            }
            let mut image: Vec<FieldElem> = f.elements().map(|a| f.abs_trace(a)).collect();
            image.sort();
            image.dedup();
            assert_eq!(image.len() as u64, p, "trace is onto F_p for q = {q}");
        }
    }
}
