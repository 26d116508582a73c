//! Dense square matrices over the integers and the rationals, plus a sparse
//! 0/1 matrix for fast products with graph adjacency.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i128>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| (i == j) as i128)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> i128) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        IntMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix rows must have equal length n".into()));
        }
        Ok(IntMatrix { n, data: rows.concat() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[i128] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &Self) -> Self {
        IntMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        IntMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: i128) -> Self {
        IntMatrix { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut data = vec![0i128; n * n];
        data.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, out)| {
            for (k, &a) in self.row(i).iter().enumerate() {
                if a != 0 {
                    for (o, &b) in out.iter_mut().zip(other.row(k)) {
                        *o += a * b;
                    }
                }
            }
        });
        IntMatrix { n, data }
    }

    pub fn trace(&self) -> i128 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn row_sums(&self) -> Vec<i128> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Maximum absolute row sum, a bound on every eigenvalue's modulus.
    pub fn max_abs_row_sum(&self) -> i128 {
        (0..self.n).map(|i| self.row(i).iter().map(|v| v.abs()).sum()).max().unwrap_or(0)
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix { n: self.n, data: self.data.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect() }
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }
}

/// Row adjacency lists of a 0/1 matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseAdj {
    n: usize,
    rows: Vec<Vec<usize>>,
}

impl SparseAdj {
    pub fn new(n: usize, rows: Vec<Vec<usize>>) -> Self {
        SparseAdj { n, rows }
    }

    pub fn from_dense(m: &IntMatrix) -> Result<Self> {
        let mut rows = Vec::with_capacity(m.n());
        for i in 0..m.n() {
            let mut r = Vec::new();
            for (j, &v) in m.row(i).iter().enumerate() {
                match v {
                    0 => {}
                    1 => r.push(j),
                    _ => return Err(Error::OutOfRange(format!("entry ({i}, {j}) = {v} is not 0/1"))),
                }
            }
            rows.push(r);
        }
        Ok(SparseAdj { n: m.n(), rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.n);
        for (i, r) in self.rows.iter().enumerate() {
            for &j in r {
                m.set(i, j, 1);
            }
        }
        m
    }

    /// `self * m`.
    pub fn mul_dense(&self, m: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut data = vec![0i128; n * n];
        data.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, out)| {
            for &k in &self.rows[i] {
                for (o, &b) in out.iter_mut().zip(m.row(k)) {
                    *o += b;
                }
            }
        });
        IntMatrix { n, data }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> Self {
        RatMatrix { n, data: vec![BigRational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        RatMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// First nonzero entry, row-major.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &BigRational)> {
        self.data.iter().position(|v| !v.is_zero()).map(|p| (p / self.n, p % self.n, &self.data[p]))
    }

    pub fn add(&self, other: &Self) -> Self {
        RatMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        RatMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RatMatrix { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        RatMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut data = vec![BigRational::zero(); n * n];
        data.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, out)| {
            for (k, a) in self.row(i).iter().enumerate() {
                if !a.is_zero() {
                    for (o, b) in out.iter_mut().zip(other.row(k)) {
                        if !b.is_zero() {
                            *o += a * b;
                        }
                    }
                }
            }
        });
        RatMatrix { n, data }
    }

    pub fn mul_int(&self, other: &IntMatrix) -> Self {
        self.mul(&other.to_rational())
    }

    pub fn trace(&self) -> BigRational {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// Sum of all entries of the entrywise product of three matrices.
    pub fn triple_sum(a: &Self, b: &Self, c: &Self) -> BigRational {
        a.data.iter().zip(&b.data).zip(&c.data).map(|((x, y), z)| x * y * z).sum()
    }

    pub fn rank(&self) -> usize {
        rank_rows(self.data.chunks(self.n.max(1)).map(<[BigRational]>::to_vec).collect())
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, piv);
            let inv = a[col][col].recip();
            for v in a[col].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= &f * p;
                    }
                }
            }
        }
        Some(RatMatrix { n, data: a.into_iter().flat_map(|r| r.into_iter().skip(n)).collect() })
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.data
    }

    pub fn max_abs(&self) -> BigRational {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_else(BigRational::zero)
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        use num_traits::ToPrimitive;
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
    }
}

/// Rank of a list of rational row vectors.
pub fn rank_rows(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (v, pv) in row.iter_mut().zip(&pivot).skip(c) {
                    *v -= &f * pv;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Incrementally maintained row-echelon basis of a span of rational vectors.
#[derive(Clone, Debug, Default)]
pub struct SpanBasis {
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl SpanBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: Vec<BigRational>) -> Vec<BigRational> {
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.reduce(v.to_vec()).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns whether it was independent of the current span.
    pub fn insert(&mut self, v: Vec<BigRational>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { return false };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        self.rows.push((p, v));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn int_products() {
        let a = IntMatrix::from_rows(&[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        let a2 = a.mul(&a);
        assert_eq!(a2, IntMatrix::identity(3).add(&IntMatrix::from_fn(3, |_, _| 1)));
        let s = SparseAdj::from_dense(&a).unwrap();
        assert_eq!(s.mul_dense(&a), a2);
        assert_eq!(s.to_dense(), a);
        assert_eq!(a.max_abs_row_sum(), 2);
    }

    #[test]
    fn sparse_rejects_non_binary() {
        let m = IntMatrix::from_rows(&[vec![2]]).unwrap();
        assert!(SparseAdj::from_dense(&m).is_err());
    }

    #[test]
    fn rational_inverse() {
        let m = RatMatrix::from_fn(2, |i, j| r([[2, 1], [1, 1]][i][j]));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMatrix::identity(2));
        let singular = RatMatrix::from_fn(2, |_, _| r(1));
        assert!(singular.inverse().is_none());
        assert_eq!(singular.rank(), 1);
        assert_eq!(RatMatrix::identity(3).rank(), 3);
    }
}
