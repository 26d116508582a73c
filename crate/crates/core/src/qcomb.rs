//! q-numbers and Gaussian binomial coefficients.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, ScalarRing};

/// Number of `k`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> Result<BigUint> {
    if k > n {
        return Err(Error::OutOfRange(format!("gaussian binomial [{n} choose {k}]")));
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 1..=k {
        num *= q.pow(n - k + i) - 1u32;
        den *= q.pow(i) - 1u32;
    }
    Ok(num / den)
}

/// Gaussian q-number `(q^x - 1)/(q - 1) = 1 + q + ... + q^{x-1}`.
pub fn qbracket_gauss(x: u32, q: u64) -> BigUint {
    let q = BigUint::from(q);
    (0..x).fold(BigUint::zero(), |acc, i| acc + q.pow(i))
}

/// Symmetric q-number `(q^x - q^{-x})/(q - q^{-1})` for the integer base `q`.
pub fn qbracket_sym(x: i64, q: u32) -> Result<ExactScalar> {
    let ring = ScalarRing::new(q)?;
    let qq = BigRational::from_integer(BigInt::from(q));
    let pow = |e: i64| -> BigRational {
        if e >= 0 {
            num_traits::pow(qq.clone(), e as usize)
        } else {
            num_traits::pow(qq.recip(), (-e) as usize)
        }
    };
    let value = (pow(x) - pow(-x)) / (qq.clone() - qq.recip());
    Ok(ExactScalar::rational_in(ring, value))
}

/// Rising q-Pochhammer `(a; q)_k = prod_{l<k} (1 - a q^l)` over the rationals.
pub fn qpochhammer(a: &BigRational, q: &BigRational, k: usize) -> BigRational {
    let mut out = BigRational::one();
    let mut ql = BigRational::one();
    for _ in 0..k {
        out *= BigRational::one() - a * &ql;
        ql *= q;
    }
    out
}

/// Ordinary binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
