//! Linear algebra over `F_q` and the upper-triangular canonical form of subspaces.
//!
//! A subspace `V` of `F_q^n` is stored as the unique upper-triangular
//! `n x n` matrix whose columns span `V`, whose diagonal lies in `{0, 1}`,
//! and whose off-diagonal entry `(i, j)` can be nonzero only when the
//! diagonal has a 0 at `i` and a 1 at `j`. The diagonal is the *profile*
//! of the subspace and its number of ones is the dimension.
//!
//! Positions are 0-based throughout.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};

/// Default cap on enumeration sizes.
pub const DEFAULT_SUBSPACE_LIMIT: u128 = 1_000_000;

/// Dense matrix over a finite field. Arithmetic takes the field explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatFq {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElem>,
}

impl MatFq {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatFq { rows, cols, entries: vec![FieldElem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FieldElem>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.entries[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    /// Convenience constructor from small integers (field indices).
    pub fn from_indices(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<FieldElem>> =
            rows.iter().map(|r| r.iter().map(|&x| FieldElem(x)).collect()).collect();
        Self::from_rows(&rows, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<FieldElem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &MatFq, f: &Field) -> MatFq {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = MatFq::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn rank(&self, f: &Field) -> usize {
        rref_with_pivots(self, f).1.len()
    }
}

fn rref_with_pivots(m: &MatFq, f: &Field) -> (MatFq, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                let tmp = a.get(r, j);
                a.set(r, j, a.get(p, j));
                a.set(p, j, tmp);
            }
        }
        let inv = f.inv(a.get(r, c)).unwrap();
        for j in 0..a.cols {
            a.set(r, j, f.mul(inv, a.get(r, j)));
        }
        for i in 0..a.rows {
            let factor = a.get(i, c);
            if i != r && !factor.is_zero() {
                for j in 0..a.cols {
                    let v = f.sub(a.get(i, j), f.mul(factor, a.get(r, j)));
                    a.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Reduced row echelon form; preserves the row space.
pub fn rref(m: &MatFq, f: &Field) -> MatFq {
    rref_with_pivots(m, f).0
}

/// Rank of a list of vectors.
pub fn rank_of(vectors: &[Vec<FieldElem>], cols: usize, f: &Field) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    MatFq::from_rows(vectors, cols).rank(f)
}

/// Dimension of the intersection of the row spaces of two bases.
pub fn intersect_dim_rows(a: &[Vec<FieldElem>], b: &[Vec<FieldElem>], cols: usize, f: &Field) -> usize {
    let da = rank_of(a, cols, f);
    let db = rank_of(b, cols, f);
    let mut stacked = a.to_vec();
    stacked.extend_from_slice(b);
    da + db - rank_of(&stacked, cols, f)
}

/// Subspace of `F_q^n` in canonical upper-triangular form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    tau: MatFq,
}

impl Subspace {
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// The canonical matrix; column `j` is nonzero iff `profile[j]`.
    pub fn tau_matrix(&self) -> &MatFq {
        &self.tau
    }

    pub fn profile(&self) -> Vec<bool> {
        (0..self.n).map(|i| self.tau.get(i, i) == FieldElem::ONE).collect()
    }

    pub fn profile_string(&self) -> String {
        self.profile().iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn dim(&self) -> usize {
        (0..self.n).filter(|&i| self.tau.get(i, i) == FieldElem::ONE).count()
    }

    /// Nonzero columns of the canonical matrix.
    pub fn basis(&self) -> Vec<Vec<FieldElem>> {
        (0..self.n)
            .filter(|&j| self.tau.get(j, j) == FieldElem::ONE)
            .map(|j| self.tau.column(j))
            .collect()
    }

    /// Positions `(i, j)`, `i < j`, that may carry arbitrary entries, row-major.
    pub fn free_positions(profile: &[bool]) -> Vec<(usize, usize)> {
        let n = profile.len();
        let mut out = Vec::new();
        for i in 0..n {
            if profile[i] {
                continue;
            }
            out.extend((i + 1..n).filter(|&j| profile[j]).map(|j| (i, j)));
        }
        out
    }

    pub fn free_entries(&self) -> Vec<FieldElem> {
        Self::free_positions(&self.profile())
            .into_iter()
            .map(|(i, j)| self.tau.get(i, j))
            .collect()
    }

    /// Builds the subspace with the given profile and free entries.
    pub fn from_parts(profile: &[bool], free: &[FieldElem]) -> Result<Self> {
        let n = profile.len();
        let pos = Self::free_positions(profile);
        if pos.len() != free.len() {
            return Err(Error::DimensionMismatch(format!(
                "profile needs {} free entries, got {}",
                pos.len(),
                free.len()
            )));
        }
        let mut tau = MatFq::zeros(n, n);
        for (i, &b) in profile.iter().enumerate() {
            if b {
                tau.set(i, i, FieldElem::ONE);
            }
        }
        for (&(i, j), &v) in pos.iter().zip(free) {
            tau.set(i, j, v);
        }
        Ok(Subspace { n, tau })
    }

    /// Compact label: profile bits, then the free entries.
    pub fn label(&self) -> String {
        let free: Vec<String> = self.free_entries().iter().map(|e| e.to_string()).collect();
        format!("{}[{}]", self.profile_string(), free.join(","))
    }

    pub fn record(&self, q: u64) -> SubspaceRecord {
        SubspaceRecord {
            n: self.n,
            q,
            profile: self.profile_string(),
            free: self.free_entries().iter().map(|e| e.0).collect(),
        }
    }

    pub fn contains(&self, other: &Subspace, f: &Field) -> Result<bool> {
        Ok(intersect_dim(self, other, f)? == other.dim())
    }

    fn order_key(&self) -> (Vec<bool>, Vec<FieldElem>) {
        (self.profile(), self.free_entries())
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.order_key().cmp(&other.order_key()))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Serialized form of a subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceRecord {
    pub n: usize,
    pub q: u64,
    pub profile: String,
    pub free: Vec<u8>,
}

impl SubspaceRecord {
    pub fn to_subspace(&self) -> Result<Subspace> {
        let profile: Vec<bool> = self
            .profile
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad profile {:?}", self.profile))),
            })
            .collect::<Result<_>>()?;
        if profile.len() != self.n {
            return Err(Error::Parse("profile length differs from n".into()));
        }
        if self.free.iter().any(|&v| v as u64 >= self.q) {
            return Err(Error::Parse("free entry outside the field".into()));
        }
        let free: Vec<FieldElem> = self.free.iter().map(|&v| FieldElem(v)).collect();
        Subspace::from_parts(&profile, &free)
    }
}

/// Canonical form of the span of `vectors` in `F_q^n`.
///
/// Column reduction where each column's pivot is its lowest nonzero entry:
/// reverse the coordinates, take the row-reduced echelon form, reverse back,
/// and put each basis vector in the column of its pivot.
pub fn tau_canonical(vectors: &[Vec<FieldElem>], n: usize, f: &Field) -> Subspace {
    let mut tau = MatFq::zeros(n, n);
    if !vectors.is_empty() {
        let reversed: Vec<Vec<FieldElem>> = vectors
            .iter()
            .map(|v| {
                assert_eq!(v.len(), n, "vector not in F_q^{n}");
                v.iter().rev().copied().collect()
            })
            .collect();
        let (r, pivots) = rref_with_pivots(&MatFq::from_rows(&reversed, n), f);
        for (row, &pc) in pivots.iter().enumerate() {
            let j = n - 1 - pc;
            for i in 0..n {
                tau.set(i, j, r.get(row, n - 1 - i));
            }
        }
    }
    Subspace { n, tau }
}

/// `dim(V ∩ U)`.
pub fn intersect_dim(v: &Subspace, u: &Subspace, f: &Field) -> Result<usize> {
    if v.n != u.n {
        return Err(Error::DimensionMismatch(format!("ambient dimensions {} and {}", v.n, u.n)));
    }
    Ok(intersect_dim_rows(&v.basis(), &u.basis(), v.n, f))
}

/// Whether `v` covers `u`, decided from the canonical matrices alone:
/// the profiles differ only at a position `k` where `v` has a 1, the
/// columns left of `k` agree, and each column right of `k` of `u` equals
/// the corresponding column of `v` plus a multiple of column `k` of `v`.
pub fn covers(v: &Subspace, u: &Subspace, f: &Field) -> Result<bool> {
    if v.n != u.n {
        return Err(Error::DimensionMismatch(format!("ambient dimensions {} and {}", v.n, u.n)));
    }
    let n = v.n;
    let pv = v.profile();
    let pu = u.profile();
    let diff: Vec<usize> = (0..n).filter(|&i| pv[i] != pu[i]).collect();
    let k = match diff.as_slice() {
        [k] if pv[*k] => *k,
        _ => return Ok(false),
    };
    for j in 0..k {
        if (0..n).any(|i| v.tau.get(i, j) != u.tau.get(i, j)) {
            return Ok(false);
        }
    }
    for j in k + 1..n {
        let c = f.sub(u.tau.get(k, j), v.tau.get(k, j));
        let ok = (0..n).all(|i| {
            let expected = f.add(v.tau.get(i, j), f.mul(c, v.tau.get(i, k)));
            u.tau.get(i, j) == expected
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Number of subspaces with profile `x - e_k` covered by a fixed subspace
/// with profile `x`: `q^{#ones of x after k}`.
pub fn cover_count(x: &[bool], k: usize, q: u64) -> Result<BigUint> {
    if k >= x.len() || !x[k] {
        return Err(Error::InvalidPosition(k));
    }
    let e = x[k + 1..].iter().filter(|&&b| b).count() as u32;
    Ok(BigUint::from(q).pow(e))
}

/// Exponent `m` in `|{V : profile(V) = x}| = q^m`.
pub fn profile_preimage_exponent(x: &[bool]) -> u32 {
    let mut zeros_before = 0;
    let mut total = 0;
    for &b in x {
        if b {
            total += zeros_before;
        } else {
            zeros_before += 1;
        }
    }
    total
}

pub fn profile_preimage_size(x: &[bool], q: u64) -> BigUint {
    BigUint::from(q).pow(profile_preimage_exponent(x))
}

/// Profiles of length `n` in lexicographic order (first coordinate most significant).
pub fn profiles(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |bits| (0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect())
}

/// Total number of subspaces of `F_q^n`.
pub fn subspace_count(n: usize, q: u64) -> u128 {
    profiles(n).map(|x| (q as u128).pow(profile_preimage_exponent(&x))).sum()
}

/// All subspaces of `F_q^n`, ordered by profile and then by free entries.
pub fn enumerate_subspaces(n: usize, f: &Field, limit: u128) -> Result<Vec<Subspace>> {
    let size = subspace_count(n, f.q());
    if size > limit {
        return Err(Error::LimitExceeded { size, limit });
    }
    let q = f.q() as u8;
    let mut out = Vec::with_capacity(size as usize);
    for x in profiles(n) {
        let slots = Subspace::free_positions(&x).len();
        let mut free = vec![FieldElem::ZERO; slots];
        loop {
            out.push(Subspace::from_parts(&x, &free)?);
            // Odometer with the last slot varying fastest.
            let mut wrapped = true;
            for slot in free.iter_mut().rev() {
                if slot.0 + 1 < q {
                    slot.0 += 1;
                    wrapped = false;
                    break;
                }
                *slot = FieldElem::ZERO;
            }
            if wrapped {
                break;
            }
        }
    }
    Ok(out)
}
