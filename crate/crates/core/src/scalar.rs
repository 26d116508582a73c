//! Exact scalars in the field `Q(q^{1/4})` for a fixed integer base `q >= 2`.
//!
//! Every value is stored as four rational coefficients over the basis
//! `{1, s, s^2, s^3}` with `s = q^{1/4}`. Depending on `q` the basis is
//! reduced:
//!
//! * `q = w^4`: `s = w` is an integer and only `c0` is used;
//! * `q = w^2`: `s = sqrt(w)`, the relation is `s^2 = w` and only `c0, c1` are used;
//! * otherwise `s^4 = q` and all four coefficients are used.
//!
//! When `q` is not a perfect square, `x^4 - q` is irreducible over the
//! rationals for every prime power, so the ring is a field.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rational exponent with denominator 4, stored as its numerator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct QuarterInt(pub i64);

impl QuarterInt {
    pub const ZERO: QuarterInt = QuarterInt(0);

    pub const fn from_int(n: i64) -> Self {
        QuarterInt(4 * n)
    }

    /// `n / 2`.
    pub const fn halves(n: i64) -> Self {
        QuarterInt(2 * n)
    }

    /// `n / 4`.
    pub const fn quarters(n: i64) -> Self {
        QuarterInt(n)
    }

    pub const fn numerator(self) -> i64 {
        self.0
    }

    pub fn times(self, k: i64) -> Self {
        QuarterInt(self.0 * k)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 4.0
    }
}

impl Add for QuarterInt {
    type Output = QuarterInt;
    fn add(self, rhs: Self) -> Self {
        QuarterInt(self.0 + rhs.0)
    }
}

impl Sub for QuarterInt {
    type Output = QuarterInt;
    fn sub(self, rhs: Self) -> Self {
        QuarterInt(self.0 - rhs.0)
    }
}

impl Neg for QuarterInt {
    type Output = QuarterInt;
    fn neg(self) -> Self {
        QuarterInt(-self.0)
    }
}

impl fmt::Display for QuarterInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = num_rational::Ratio::new(self.0, 4);
        write!(f, "{r}")
    }
}

/// Basis data of the scalar ring for a given base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScalarRing {
    q: u32,
    /// Number of basis elements in use (1, 2 or 4).
    degree: u8,
    /// The integer `s^degree`.
    top: u64,
}

impl ScalarRing {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidBase(q as u64));
        }
        let q64 = q as u64;
        let w2 = q64.sqrt();
        if w2 * w2 == q64 {
            let w4 = w2.sqrt();
            if w4 * w4 == w2 {
                return Ok(ScalarRing { q, degree: 1, top: w4 });
            }
            return Ok(ScalarRing { q, degree: 2, top: w2 });
        }
        Ok(ScalarRing { q, degree: 4, top: q64 })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    /// Real value of the generator `s = q^{1/4}`.
    pub fn generator_f64(&self) -> f64 {
        match self.degree {
            1 => self.top as f64,
            2 => (self.top as f64).sqrt(),
            _ => (self.q as f64).sqrt().sqrt(),
        }
    }
}

/// An exact element of `Q(q^{1/4})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    ring: ScalarRing,
    coeffs: [BigRational; 4],
}

fn zero_coeffs() -> [BigRational; 4] {
    [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()]
}

fn int_pow(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

impl ExactScalar {
    /// The exact value `q^k`.
    pub fn new(q: u32, k: QuarterInt) -> Result<Self> {
        let ring = ScalarRing::new(q)?;
        Ok(Self::power(ring, k))
    }

    /// `s^k` in the given ring, where `s^deg = top`.
    pub fn power(ring: ScalarRing, k: QuarterInt) -> Self {
        let deg = ring.degree as i64;
        let j = k.0.rem_euclid(deg) as usize;
        let m = k.0.div_euclid(deg);
        let scale = if m >= 0 {
            BigRational::from_integer(int_pow(ring.top, m as u32))
        } else {
            BigRational::new(BigInt::one(), int_pow(ring.top, (-m) as u32))
        };
        let mut coeffs = zero_coeffs();
        coeffs[j] = scale;
        ExactScalar { ring, coeffs }
    }

    pub fn zero(q: u32) -> Result<Self> {
        Ok(Self::zero_in(ScalarRing::new(q)?))
    }

    pub fn one(q: u32) -> Result<Self> {
        Ok(Self::rational_in(ScalarRing::new(q)?, BigRational::one()))
    }

    pub fn zero_in(ring: ScalarRing) -> Self {
        ExactScalar { ring, coeffs: zero_coeffs() }
    }

    pub fn rational_in(ring: ScalarRing, r: BigRational) -> Self {
        let mut coeffs = zero_coeffs();
        coeffs[0] = r;
        ExactScalar { ring, coeffs }
    }

    pub fn integer_in(ring: ScalarRing, n: i64) -> Self {
        Self::rational_in(ring, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(q: u32, r: BigRational) -> Result<Self> {
        Ok(Self::rational_in(ScalarRing::new(q)?, r))
    }

    pub fn integer(q: u32, n: i64) -> Result<Self> {
        Ok(Self::integer_in(ScalarRing::new(q)?, n))
    }

    /// Builds a scalar from coefficients over `{1, s, s^2, s^3}`, reducing
    /// them into the ring's basis.
    pub fn from_coeffs(q: u32, coeffs: [BigRational; 4]) -> Result<Self> {
        let ring = ScalarRing::new(q)?;
        let mut out = ExactScalar::zero_in(ring);
        for (j, c) in coeffs.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = ExactScalar::power(ring, QuarterInt(j as i64));
            term.scale_rational(&c);
            out += &term;
        }
        Ok(out)
    }

    pub fn ring(&self) -> ScalarRing {
        self.ring
    }

    pub fn base_q(&self) -> u32 {
        self.ring.q
    }

    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if the scalar lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        let s = self.ring.generator_f64();
        let mut acc = 0.0;
        let mut p = 1.0;
        for c in &self.coeffs[..self.ring.degree()] {
            if !c.is_zero() {
                acc += c.to_f64().unwrap_or(f64::NAN) * p;
            }
            p *= s;
        }
        acc
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring.q != other.ring.q {
            Err(Error::BaseMismatch(self.ring.q, other.ring.q))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_in_place(other);
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        out.sub_in_place(other);
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_in_place(&mut self, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }

    fn sub_in_place(&mut self, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a -= b;
            }
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let deg = self.ring.degree();
        if deg == 1 {
            let mut coeffs = zero_coeffs();
            if !self.coeffs[0].is_zero() && !other.coeffs[0].is_zero() {
                coeffs[0] = &self.coeffs[0] * &other.coeffs[0];
            }
            return ExactScalar { ring: self.ring, coeffs };
        }
        let top = BigRational::from_integer(BigInt::from(self.ring.top));
        let mut coeffs = zero_coeffs();
        for (i, a) in self.coeffs[..deg].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..deg].iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let prod = a * b;
                let k = i + j;
                if k >= deg {
                    coeffs[k - deg] += prod * &top;
                } else {
                    coeffs[k] += prod;
                }
            }
        }
        ExactScalar { ring: self.ring, coeffs }
    }

    pub fn scale_rational(&mut self, r: &BigRational) {
        for c in self.coeffs.iter_mut() {
            if !c.is_zero() {
                *c *= r;
            }
        }
    }

    /// Multiplicative inverse, found by solving `self * x = 1` over the
    /// coefficient basis.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let deg = self.ring.degree();
        if let Some(r) = self.as_rational() {
            return Ok(ExactScalar::rational_in(self.ring, r.recip()));
        }
        // Column j holds the coordinates of self * s^j.
        let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); deg + 1]; deg];
        for j in 0..deg {
            let col = self.mul_unchecked(&ExactScalar::power(self.ring, QuarterInt(j as i64)));
            for (i, row) in m.iter_mut().enumerate() {
                row[j] = col.coeffs[i].clone();
            }
        }
        m[0][deg] = BigRational::one();
        let x = solve_augmented(m).ok_or(Error::NonInvertible)?;
        let mut coeffs = zero_coeffs();
        for (c, v) in coeffs.iter_mut().zip(x) {
            *c = v;
        }
        Ok(ExactScalar { ring: self.ring, coeffs })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    /// Parses the `"c0|c1|c2|c3"` coefficient form for base `q`.
    pub fn parse(q: u32, s: &str) -> Result<Self> {
        let ring = ScalarRing::new(q)?;
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected 4 coefficients in {s:?}")));
        }
        let mut coeffs = zero_coeffs();
        for (c, p) in coeffs.iter_mut().zip(parts) {
            *c = BigRational::from_str(p.trim())
                .map_err(|e| Error::Parse(format!("bad rational {p:?}: {e}")))?;
        }
        if coeffs[ring.degree()..].iter().any(|c| !c.is_zero()) {
            return Err(Error::Parse(format!(
                "{s:?} has coefficients beyond the reduced basis for q = {q}"
            )));
        }
        Ok(ExactScalar { ring, coeffs })
    }

    /// Largest absolute value among the coefficients; zero iff the scalar is zero.
    pub fn max_abs_coeff(&self) -> BigRational {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
    }
}

/// Gauss-Jordan solve of a square augmented system; `None` if singular.
pub(crate) fn solve_augmented(mut m: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (a, b) in m[r].iter_mut().zip(&pivot_row) {
                    *a -= &f * b;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}|{}|{}",
            self.coeffs[0], self.coeffs[1], self.coeffs[2], self.coeffs[3]
        )
    }
}

impl Add<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        self.try_add(rhs).expect("mixed scalar bases")
    }
}

impl Sub<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self.try_sub(rhs).expect("mixed scalar bases")
    }
}

impl Mul<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        self.try_mul(rhs).expect("mixed scalar bases")
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -c.clone();
        }
        out
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        assert_eq!(self.ring.q, rhs.ring.q, "mixed scalar bases");
        self.add_in_place(rhs);
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        assert_eq!(self.ring.q, rhs.ring.q, "mixed scalar bases");
        self.sub_in_place(rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn new_monomials() {
        assert!(ExactScalar::new(2, QuarterInt::ZERO).unwrap().is_one());
        let half = ExactScalar::new(2, QuarterInt::halves(1)).unwrap();
        assert_eq!(half.to_string(), "0|0|1|0");
        assert!((half.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-12);
        // 4^{1/4} = sqrt 2 lives in the degree-2 basis as s.
        let r = ExactScalar::new(4, QuarterInt::quarters(1)).unwrap();
        assert_eq!(r.ring().degree(), 2);
        assert_eq!(r.to_string(), "0|1|0|0");
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(ExactScalar::new(1, QuarterInt::ZERO), Err(Error::InvalidBase(1))));
    }

    #[test]
    fn perfect_fourth_power_is_rational() {
        let r = ExactScalar::new(16, QuarterInt::quarters(-3)).unwrap();
        assert_eq!(r.as_rational(), Some(&rat(1, 8)));
    }

    #[test]
    fn multiplication_examples() {
        let s = ExactScalar::new(3, QuarterInt::quarters(1)).unwrap();
        let s3 = ExactScalar::new(3, QuarterInt::quarters(3)).unwrap();
        assert_eq!((&s * &s3).as_rational(), Some(&rat(3, 1)));

        let one = ExactScalar::one(3).unwrap();
        let a = &one + &s;
        let b = &one - &s;
        let s2 = ExactScalar::new(3, QuarterInt::halves(1)).unwrap();
        assert_eq!(&a * &b, &one - &s2);

        let h = ExactScalar::new(2, QuarterInt::halves(1)).unwrap();
        assert_eq!((&h * &h).as_rational(), Some(&rat(2, 1)));
    }

    #[test]
    fn inverse_examples() {
        let h = ExactScalar::new(5, QuarterInt::halves(1)).unwrap();
        let hi = h.inv().unwrap();
        assert_eq!(hi, ExactScalar::new(5, QuarterInt::halves(-1)).unwrap());
        assert!((&h * &hi).is_one());

        // (1 + sqrt 2)^{-1} = sqrt 2 - 1
        let one = ExactScalar::one(2).unwrap();
        let s2 = ExactScalar::new(2, QuarterInt::halves(1)).unwrap();
        let x = (&one + &s2).inv().unwrap();
        assert_eq!(x, &s2 - &one);

        assert!(matches!(ExactScalar::zero(2).unwrap().inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn base_mismatch_is_an_error() {
        let a = ExactScalar::one(2).unwrap();
        let b = ExactScalar::one(3).unwrap();
        assert!(matches!(a.try_mul(&b), Err(Error::BaseMismatch(2, 3))));
    }

    #[test]
    fn parse_rejects_unreduced() {
        assert!(ExactScalar::parse(4, "1|0|1|0").is_err());
        let x = ExactScalar::parse(4, "1/2|-3|0|0").unwrap();
        assert_eq!(x.to_string(), "1/2|-3|0|0");
    }

    fn arb_scalar(q: u32) -> impl Strategy<Value = ExactScalar> {
        proptest::collection::vec((-20i64..20, 1i64..6), 4).prop_map(move |v| {
            let c = [rat(v[0].0, v[0].1), rat(v[1].0, v[1].1), rat(v[2].0, v[2].1), rat(v[3].0, v[3].1)];
            ExactScalar::from_coeffs(q, c).unwrap()
        })
    }

    fn arb_q() -> impl Strategy<Value = u32> {
        prop::sample::select(vec![2u32, 3, 4, 5, 8, 9, 16])
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in arb_q().prop_flat_map(|q| (arb_scalar(q), arb_scalar(q), arb_scalar(q)))) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            let fa = a.to_f64();
            let fb = b.to_f64();
            let prod = (&a * &b).to_f64();
            prop_assert!((prod - fa * fb).abs() <= 1e-10 * (1.0 + (fa * fb).abs()));
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn exponents_add(q in arb_q(), a in -32i64..=32, b in -32i64..=32) {
            let x = ExactScalar::new(q, QuarterInt(a)).unwrap();
            let y = ExactScalar::new(q, QuarterInt(b)).unwrap();
            prop_assert_eq!(&x * &y, ExactScalar::new(q, QuarterInt(a + b)).unwrap());
            let f = (q as f64).powf((a + b) as f64 / 4.0);
            prop_assert!(((&x * &y).to_f64() - f).abs() <= 1e-10 * f);
        }

        #[test]
        fn string_round_trip(q in arb_q(), v in proptest::collection::vec((-50i64..50, 1i64..9), 4)) {
            let c = [rat(v[0].0, v[0].1), rat(v[1].0, v[1].1), rat(v[2].0, v[2].1), rat(v[3].0, v[3].1)];
            let x = ExactScalar::from_coeffs(q, c).unwrap();
            prop_assert_eq!(ExactScalar::parse(q, &x.to_string()).unwrap(), x);
        }
    }
}
