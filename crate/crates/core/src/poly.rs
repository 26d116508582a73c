//! Univariate polynomials with exact coefficients and their evaluation at
//! integer matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dense::{IntMatrix, RatMatrix, SparseAdj};
use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, ScalarRing};

/// Coefficients lowest degree first; trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RatPoly(Vec<BigRational>);

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly(coeffs)
    }

    pub fn zero() -> Self {
        RatPoly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        RatPoly(vec![BigRational::zero(), BigRational::one()])
    }

    /// `a x + b`.
    pub fn linear(a: BigRational, b: BigRational) -> Self {
        Self::new(vec![b, a])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.0.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Self) -> Self {
        self.0.iter().rev().fold(Self::zero(), |acc, c| acc.mul(inner).add(&Self::constant(c.clone())))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Divides by `x - r`, returning the quotient when the remainder is zero.
    pub fn divide_root(&self, r: &BigRational) -> Option<Self> {
        let n = self.0.len();
        if n == 0 {
            return Some(Self::zero());
        }
        let mut q = vec![BigRational::zero(); n - 1];
        let mut carry = BigRational::zero();
        for k in (0..n).rev() {
            let v = &self.0[k] + &carry * r;
            if k == 0 {
                return v.is_zero().then(|| Self::new(q));
            }
            q[k - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Least common multiple of the coefficient denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// `p(A)` from a precomputed list of powers `[I, A, A^2, ...]`, returned
    /// as the integer matrix `D p(A)` together with the common denominator `D`.
    pub fn eval_scaled(&self, powers: &[IntMatrix]) -> Result<(IntMatrix, BigInt)> {
        let d = self.common_denominator();
        let n = powers.first().map_or(0, IntMatrix::n);
        let mut acc = IntMatrix::zeros(n);
        for (k, c) in self.0.iter().enumerate() {
            let p = powers
                .get(k)
                .ok_or_else(|| Error::OutOfRange(format!("power {k} of the matrix was not supplied")))?;
            let scaled = c * BigRational::from_integer(d.clone());
            let ci = i128::try_from(scaled.to_integer())
                .map_err(|_| Error::OutOfRange("polynomial coefficient exceeds 128 bits".into()))?;
            if ci != 0 {
                acc = acc.add(&p.scale(ci));
            }
        }
        Ok((acc, d))
    }

    /// `p(A)` as an exact rational matrix.
    pub fn eval_rational(&self, powers: &[IntMatrix]) -> Result<RatMatrix> {
        let (m, d) = self.eval_scaled(powers)?;
        let inv = BigRational::new(BigInt::one(), d);
        Ok(m.to_rational().scale(&inv))
    }

    /// Integer roots in `[-bound, bound]`, each listed once per multiplicity.
    /// Returns the roots and the cofactor left after dividing them out.
    pub fn integer_roots(&self, bound: i128) -> (Vec<BigRational>, RatPoly) {
        let mut p = self.clone();
        let mut roots = Vec::new();
        for r in -bound..=bound {
            let r = BigRational::from_integer(BigInt::from(r));
            while p.degree().unwrap_or(0) > 0 {
                match p.divide_root(&r) {
                    Some(qt) => {
                        roots.push(r.clone());
                        p = qt;
                    }
                    None => break,
                }
            }
        }
        (roots, p)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// `[I, A, ..., A^k]` by repeated sparse multiplication.
pub fn matrix_powers(a: &SparseAdj, k: usize) -> Vec<IntMatrix> {
    let mut out = vec![IntMatrix::identity(a.n())];
    for _ in 0..k {
        let next = a.mul_dense(out.last().unwrap());
        out.push(next);
    }
    out
}

/// Monic minimal polynomial of an integer matrix, found as the first linear
/// dependency among `I, A, A^2, ...` (at most `max_degree` steps).
pub fn minimal_polynomial(a: &IntMatrix, max_degree: usize) -> Result<RatPoly> {
    // Each reduced power is kept with its expression in terms of the original
    // powers, so a dependency yields the polynomial directly.
    let mut basis: Vec<(usize, Vec<BigRational>, RatPoly)> = Vec::new();
    let mut power = IntMatrix::identity(a.n());
    for k in 0..=max_degree {
        let mut v: Vec<BigRational> = power.entries().iter().map(|&e| BigRational::from_integer(e.into())).collect();
        let mut expr = RatPoly::new((0..=k).map(|i| if i == k { rat(1) } else { rat(0) }).collect());
        for (pivot, bv, bexpr) in &basis {
            if !v[*pivot].is_zero() {
                let f = v[*pivot].clone();
                for (x, y) in v.iter_mut().zip(bv) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
                expr = expr.sub(&bexpr.scale(&f));
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => {
                let lead = expr.coeff(k);
                return Ok(expr.scale(&lead.recip()));
            }
            Some(p) => {
                let inv = v[p].recip();
                for x in v.iter_mut() {
                    *x *= &inv;
                }
                basis.push((p, v, expr.scale(&inv)));
            }
        }
        power = power.mul(a);
    }
    Err(Error::OutOfRange(format!("minimal polynomial has degree above {max_degree}")))
}

/// Polynomial with coefficients in an exact scalar ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarPoly {
    ring: ScalarRing,
    coeffs: Vec<ExactScalar>,
}

impl ScalarPoly {
    pub fn new(ring: ScalarRing, mut coeffs: Vec<ExactScalar>) -> Self {
        while coeffs.last().is_some_and(ExactScalar::is_zero) {
            coeffs.pop();
        }
        ScalarPoly { ring, coeffs }
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::new(c.ring(), vec![c])
    }

    pub fn one(ring: ScalarRing) -> Self {
        Self::constant(ExactScalar::integer_in(ring, 1))
    }

    /// `a x + b`.
    pub fn linear(a: ExactScalar, b: ExactScalar) -> Self {
        Self::new(a.ring(), vec![b, a])
    }

    pub fn coeffs(&self) -> &[ExactScalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn coeff(&self, k: usize) -> ExactScalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ExactScalar::zero_in(self.ring))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|k| self.coeff(k).try_add(&other.coeff(k))).collect::<Result<_>>()?;
        Ok(Self::new(self.ring, c))
    }

    pub fn scale(&self, c: &ExactScalar) -> Result<Self> {
        let v = self.coeffs.iter().map(|a| a.try_mul(c)).collect::<Result<_>>()?;
        Ok(Self::new(self.ring, v))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(Self::new(self.ring, Vec::new()));
        }
        let mut out = vec![ExactScalar::zero_in(self.ring); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].try_add(&a.try_mul(b)?)?;
            }
        }
        Ok(Self::new(self.ring, out))
    }

    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let mut acc = Self::new(self.ring, Vec::new());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner)?.add(&Self::constant(c.clone()))?;
        }
        Ok(acc)
    }

    pub fn eval(&self, x: &ExactScalar) -> Result<ExactScalar> {
        let mut acc = ExactScalar::zero_in(self.ring);
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(x)?.try_add(c)?;
        }
        Ok(acc)
    }

    /// Splits along the basis `1, s, s^2, s^3` of the scalar ring: the
    /// polynomial equals `sum_c s^c P_c(x)` with rational `P_c`.
    pub fn components(&self) -> [RatPoly; 4] {
        std::array::from_fn(|c| RatPoly::new(self.coeffs.iter().map(|a| a.coeffs()[c].clone()).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::QuarterInt;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::new(c.iter().map(|&v| rat(v)).collect())
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(a.mul(&b), p(&[-1, 0, 1]));
        assert_eq!(a.add(&b), p(&[0, 2]));
        assert_eq!(a.sub(&a), RatPoly::zero());
        assert_eq!(p(&[0, 0, 1]).compose(&a), p(&[1, 2, 1]));
        assert_eq!(p(&[-1, 0, 1]).eval(&rat(3)), rat(8));
        assert_eq!(p(&[-1, 0, 1]).divide_root(&rat(1)), Some(p(&[1, 1])));
        assert_eq!(p(&[-1, 0, 1]).divide_root(&rat(2)), None);
    }

    #[test]
    fn roots() {
        let f = p(&[-6, 1, 1]).mul(&p(&[1, 0, 1]));
        let (r, rest) = f.integer_roots(10);
        assert_eq!(r, vec![rat(-3), rat(2)]);
        assert_eq!(rest, p(&[1, 0, 1]));
    }

    #[test]
    fn triangle_minimal_polynomial() {
        let a = IntMatrix::from_fn(3, |i, j| (i != j) as i128);
        let m = minimal_polynomial(&a, 5).unwrap();
        // (x - 2)(x + 1)
        assert_eq!(m, p(&[-2, -1, 1]));
        let s = SparseAdj::from_dense(&a).unwrap();
        let pw = matrix_powers(&s, 2);
        assert!(m.eval_rational(&pw).unwrap().is_zero());
    }

    #[test]
    fn scaled_evaluation() {
        let a = IntMatrix::from_fn(2, |i, j| (i != j) as i128);
        let s = SparseAdj::from_dense(&a).unwrap();
        let pw = matrix_powers(&s, 1);
        let half = RatPoly::new(vec![BigRational::new(1.into(), 2.into()), rat(0)]);
        let (m, d) = half.eval_scaled(&pw).unwrap();
        assert_eq!(d, BigInt::from(2));
        assert_eq!(m, IntMatrix::identity(2));
    }

    #[test]
    fn scalar_components() {
        let ring = ScalarRing::new(2).unwrap();
        let s = ExactScalar::power(ring, QuarterInt::quarters(1));
        let poly = ScalarPoly::linear(s.clone(), ExactScalar::integer_in(ring, 3));
        let [c0, c1, c2, c3] = poly.components();
        assert_eq!(c0, p(&[3]));
        assert_eq!(c1, p(&[0, 1]));
        assert!(c2.is_zero() && c3.is_zero());
        let sq = poly.mul(&poly).unwrap();
        assert_eq!(sq.eval(&s).unwrap(), poly.eval(&s).unwrap().try_mul(&poly.eval(&s).unwrap()).unwrap());
    }
}
