//! The weighted hypercube `A_{q^t}` and the binary Hamming scheme.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dense::IntMatrix;
use crate::error::{Error, Result};
use crate::graph::DistanceTable;
use crate::operator::Operator;
use crate::poly::{matrix_powers, RatPoly};
use crate::qcomb::binomial;
use crate::report::{Check, Report};
use crate::scalar::{ExactScalar, QuarterInt, ScalarRing};

pub const MAX_HAMMING_N: usize = 12;

/// The cube `{0,1}^n` weighted by powers of `q^t`. Vertices are bit strings
/// in lexicographic order, `x_1` most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CubeContext {
    pub n: usize,
    pub q: u32,
    pub t: QuarterInt,
}

impl CubeContext {
    pub fn new(n: usize, q: u32, t: QuarterInt) -> Result<Self> {
        if n > 24 {
            return Err(Error::LimitExceeded { size: 1u128 << n, limit: 1 << 24 });
        }
        ScalarRing::new(q)?;
        Ok(CubeContext { n, q, t })
    }

    pub fn ring(&self) -> ScalarRing {
        ScalarRing::new(self.q).expect("validated in new")
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> Vec<String> {
        cube_labels(self.n)
    }
}

pub fn cube_labels(n: usize) -> Vec<String> {
    (0..1usize << n).map(|v| bits(v, n).iter().map(|&b| if b { '1' } else { '0' }).collect()).collect()
}

/// Coordinates `x_1..x_n` of vertex index `v`.
pub fn bits(v: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| (v >> (n - 1 - i)) & 1 == 1).collect()
}

/// Index of the vertex with coordinates `x`.
pub fn index_of_bits(x: &[bool]) -> usize {
    x.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Entry `(x, y)` is `(q^t)^{i - N + 2 sum_{j > i} x_j}` when `x` and `y`
/// differ exactly at position `i` (1-based).
pub fn build_aq(ctx: &CubeContext) -> Result<Operator> {
    let ring = ctx.ring();
    let n = ctx.n;
    let mut entries = Vec::with_capacity(ctx.len() * n);
    for v in 0..ctx.len() {
        let x = bits(v, n);
        for i in 1..=n {
            let tail: i64 = x[i..].iter().map(|&b| b as i64).sum();
            let e = i as i64 - n as i64 + 2 * tail;
            let w = v ^ (1 << (n - i));
            entries.push((v, w, ExactScalar::power(ring, ctx.t.times(e))));
        }
    }
    Operator::from_entries(ring, ctx.labels(), ctx.labels(), entries)
}

/// `sum_i I^{(i-1)} (x) sigma_x (x) (q^{-t sigma_z})^{(N-i)}` by Kronecker products.
pub fn build_aq_tensor(ctx: &CubeContext) -> Result<Operator> {
    let ring = ctx.ring();
    let two: Vec<String> = vec!["0".into(), "1".into()];
    let id = Operator::identity_in(ring, two.clone());
    let one = ExactScalar::integer_in(ring, 1);
    let sigma_x = Operator::from_entries(ring, two.clone(), two.clone(), [(0, 1, one.clone()), (1, 0, one)])?;
    let weight = Operator::diagonal_in(
        ring,
        two,
        vec![ExactScalar::power(ring, -ctx.t), ExactScalar::power(ring, ctx.t)],
    )?;
    let empty = Operator::identity_in(ring, vec![String::new()]);
    let mut sum = Operator::zeros_in(ring, ctx.labels(), ctx.labels());
    for i in 1..=ctx.n {
        let mut term = empty.clone();
        for j in 1..=ctx.n {
            let factor = match j.cmp(&i) {
                std::cmp::Ordering::Less => &id,
                std::cmp::Ordering::Equal => &sigma_x,
                std::cmp::Ordering::Greater => &weight,
            };
            term = term.kron(factor)?;
        }
        sum = sum.try_add(&term)?;
    }
    Ok(sum)
}

/// The coordinate-reversal permutation `pi` as an operator: `pi e_x = e_{rev x}`.
pub fn reversal_operator(n: usize, ring: ScalarRing) -> Result<Operator> {
    let one = ExactScalar::integer_in(ring, 1);
    let labels = cube_labels(n);
    Operator::from_entries(
        ring,
        labels.clone(),
        labels,
        (0..1usize << n).map(|v| {
            let mut x = bits(v, n);
            x.reverse();
            (index_of_bits(&x), v, one.clone())
        }),
    )
}

/// Weight formula vs tensor form, symmetry, and the unweighted case.
pub fn check_aq_forms(ctx: &CubeContext) -> Result<Report> {
    let mut report = Report::new();
    let aq = build_aq(ctx)?;
    let tensor = build_aq_tensor(ctx)?;
    report.push(Check::exact("aq/weight_vs_tensor", &aq.try_sub(&tensor)?));
    report.push(Check::holds("aq/symmetric", aq.is_symmetric(), || "A_q differs from its transpose".into()));
    if ctx.t == QuarterInt::ZERO {
        let a1 = hamming_distance_matrices(ctx.n)?.operator(1, ctx.ring())?;
        report.push(Check::exact("aq/unweighted_is_hypercube", &aq.try_sub(&a1)?));
    }
    Ok(report)
}

/// Distance table of the hypercube `Q_n` (Hamming distance).
pub fn hamming_distance_matrices(n: usize) -> Result<DistanceTable> {
    if n > MAX_HAMMING_N {
        return Err(Error::LimitExceeded { size: 1u128 << n, limit: 1u128 << MAX_HAMMING_N });
    }
    DistanceTable::from_fn(cube_labels(n), |x, y| (x ^ y).count_ones() as usize)
}

/// `A_1 A_i = (i+1) A_{i+1} + (N-i+1) A_{i-1}` for every `0 <= i <= N`.
pub fn check_hamming_recurrence(n: usize) -> Result<Report> {
    let table = hamming_distance_matrices(n)?;
    let a1 = table.adjacency(1);
    let mats: Vec<IntMatrix> = (0..=n).map(|i| table.matrix(i)).collect();
    let zero = IntMatrix::zeros(table.len());
    let mut report = Report::new();
    for i in 0..=n {
        let lhs = a1.mul_dense(&mats[i]);
        let up = mats.get(i + 1).unwrap_or(&zero).scale(i as i128 + 1);
        let down = if i > 0 { mats[i - 1].scale((n - i + 1) as i128) } else { zero.clone() };
        let residual = lhs.sub(&up).sub(&down);
        report.push(int_residual_check(format!("ttrh/i={i}"), &residual, table.labels()));
    }
    Ok(report)
}

pub(crate) fn int_residual_check(name: String, residual: &IntMatrix, labels: &[String]) -> Check {
    match residual.entries().iter().position(|&v| v != 0) {
        None => Check::pass(name),
        Some(p) => {
            let n = residual.n();
            Check::fail(
                name,
                residual.entries()[p].to_string(),
                Some(format!("entry ({}, {})", labels[p / n], labels[p % n])),
            )
        }
    }
}

fn pochhammer_neg(m: i64, k: usize) -> BigRational {
    // (-m)_k = (-m)(-m+1)...(-m+k-1)
    (0..k as i64).fold(BigRational::one(), |acc, l| acc * BigRational::from_integer(BigInt::from(l - m)))
}

fn factorial(k: usize) -> BigRational {
    BigRational::from_integer((1..=k as i64).fold(BigInt::one(), |acc, v| acc * v))
}

/// `K_i(x; p, N)` as a polynomial in `x`:
/// `sum_k (-i)_k (-x)_k / ((-N)_k k!) p^{-k}`.
pub fn krawtchouk_poly(i: usize, p: &BigRational, n: usize) -> Result<RatPoly> {
    if i > n {
        return Err(Error::OutOfRange(format!("Krawtchouk degree {i} exceeds N = {n}")));
    }
    if p.is_zero() {
        return Err(Error::OutOfRange("Krawtchouk parameter p must be nonzero".into()));
    }
    let mut sum = RatPoly::zero();
    let mut falling = RatPoly::constant(BigRational::one());
    let mut p_pow = BigRational::one();
    for k in 0..=i {
        let c = pochhammer_neg(i as i64, k) / (pochhammer_neg(n as i64, k) * factorial(k)) / &p_pow;
        sum = sum.add(&falling.scale(&c));
        // (-x)_{k+1} = (-x)_k (k - x)
        falling = falling.mul(&RatPoly::linear(-BigRational::one(), BigRational::from_integer(BigInt::from(k))));
        p_pow *= p;
    }
    Ok(sum)
}

pub fn krawtchouk(i: usize, x: &BigRational, p: &BigRational, n: usize) -> Result<BigRational> {
    Ok(krawtchouk_poly(i, p, n)?.eval(x))
}

/// `A_i = C(N, i) K_i(N/2 - A_1/2; 1/2, N)` as matrix identities.
pub fn check_kp_identity(n: usize) -> Result<Report> {
    let table = hamming_distance_matrices(n)?;
    let powers = matrix_powers(&table.adjacency(1), n);
    let half = BigRational::new(1.into(), 2.into());
    let arg = RatPoly::linear(-half.clone(), BigRational::from_integer(BigInt::from(n)) * &half);
    let mut report = Report::new();
    for i in 0..=n {
        let coeff = BigRational::from_integer(BigInt::from(binomial(n as u64, i as u64)));
        let poly = krawtchouk_poly(i, &half, n)?.compose(&arg).scale(&coeff);
        let (scaled, d) = poly.eval_scaled(&powers)?;
        let d = i128::try_from(d).map_err(|_| Error::OutOfRange("denominator exceeds 128 bits".into()))?;
        let residual = scaled.sub(&table.matrix(i).scale(d));
        report.push(int_residual_check(format!("kp/i={i}"), &residual, table.labels()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn aq_n2_entries() {
        let ctx = CubeContext::new(2, 2, QuarterInt::from_int(1)).unwrap();
        let a = build_aq(&ctx).unwrap();
        let ring = ctx.ring();
        // 00 -> 10 differs at position 1: exponent 1 - 2 + 0.
        assert_eq!(a.get(0, 2), ExactScalar::power(ring, QuarterInt::from_int(-1)));
        // 01 -> 11 differs at position 1 with x_2 = 1: exponent 1.
        assert_eq!(a.get(1, 3), ExactScalar::power(ring, QuarterInt::from_int(1)));
        // 00 -> 01 differs at position 2: exponent 0.
        assert!(a.get(0, 1).is_one());
        assert!(a.is_symmetric());
    }

    #[test]
    fn tensor_n1_is_sigma_x() {
        let ctx = CubeContext::new(1, 3, QuarterInt::from_int(1)).unwrap();
        let t = build_aq_tensor(&ctx).unwrap();
        assert_eq!(t.row_labels(), &["0".to_string(), "1".to_string()]);
        assert!(t.get(0, 1).is_one() && t.get(1, 0).is_one() && t.nnz() == 2);
    }

    #[test]
    fn forms_agree_small() {
        for (n, q, t) in [(2, 2, 1), (3, 3, 1), (4, 2, 0), (3, 2, -2)] {
            let ctx = CubeContext::new(n, q, QuarterInt::from_int(t)).unwrap();
            let report = check_aq_forms(&ctx).unwrap();
            assert!(report.all_passed(), "{n} {q} {t}: {:?}", report.checks);
        }
        let ctx = CubeContext::new(3, 2, QuarterInt::halves(-1)).unwrap();
        assert!(check_aq_forms(&ctx).unwrap().all_passed());
    }

    #[test]
    fn reversal() {
        let ring = ScalarRing::new(2).unwrap();
        let pi = reversal_operator(3, ring).unwrap();
        // 001 <-> 100
        assert!(pi.get(4, 1).is_one());
        assert!(pi.try_mul(&pi).unwrap().same_entries(&Operator::identity_in(ring, cube_labels(3))));
    }

    #[test]
    fn hamming_tables() {
        let t = hamming_distance_matrices(2).unwrap();
        let a2 = t.matrix(2);
        assert_eq!(a2.row_sums(), vec![1; 4]);
        assert_eq!(a2.get(0, 3), 1);
        let t3 = hamming_distance_matrices(3).unwrap();
        assert_eq!(t3.matrix(1).row_sums(), vec![3; 8]);
        assert!(hamming_distance_matrices(13).is_err());
    }

    #[test]
    fn recurrence_and_kp() {
        for n in 1..=4 {
            assert!(check_hamming_recurrence(n).unwrap().all_passed());
            assert!(check_kp_identity(n).unwrap().all_passed());
        }
    }

    #[test]
    fn recurrence_n2_i1_by_hand() {
        let t = hamming_distance_matrices(2).unwrap();
        let a1 = t.matrix(1);
        let lhs = a1.mul(&a1);
        assert_eq!(lhs, t.matrix(2).scale(2).add(&t.matrix(0).scale(2)));
    }

    #[test]
    fn krawtchouk_values() {
        let half = r(1, 2);
        for x in 0..5 {
            assert_eq!(krawtchouk(0, &r(x, 1), &half, 4).unwrap(), r(1, 1));
            assert_eq!(krawtchouk(1, &r(x, 1), &half, 4).unwrap(), r(1, 1) - r(2 * x, 4));
        }
        assert!(krawtchouk(5, &r(0, 1), &half, 4).is_err());
    }

    #[test]
    fn krawtchouk_generating_function() {
        // binom(N,i) K_i(x; 1/2, N) = sum_l (-1)^l C(x, l) C(N - x, i - l).
        let n = 6u64;
        for i in 0..=n {
            for x in 0..=n {
                let k = krawtchouk(i as usize, &r(x as i64, 1), &r(1, 2), n as usize).unwrap();
                let lhs = k * BigRational::from_integer(BigInt::from(binomial(n, i)));
                let rhs: BigInt = (0..=i)
                    .map(|l| {
                        let term = BigInt::from(binomial(x, l)) * BigInt::from(binomial(n - x, i - l));
                        if l % 2 == 1 { -term } else { term }
                    })
                    .sum();
                assert_eq!(lhs, BigRational::from_integer(rhs), "i={i} x={x}");
            }
        }
    }
}
