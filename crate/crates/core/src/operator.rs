//! Sparse exact matrices with labeled rows and columns, and their JSON form.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, ScalarRing};

pub const MATRIX_SCHEMA: &str = "qlab-matrix/1";

/// An exact matrix over `Q(q^{1/4})`. Rows store their nonzero entries
/// sorted by column; explicit zeros are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operator {
    ring: ScalarRing,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    rows: Vec<Vec<(usize, ExactScalar)>>,
}

impl Operator {
    pub fn zeros(q: u32, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        let ring = ScalarRing::new(q)?;
        Ok(Self::zeros_in(ring, row_labels, col_labels))
    }

    pub fn zeros_in(ring: ScalarRing, row_labels: Vec<String>, col_labels: Vec<String>) -> Self {
        let rows = vec![Vec::new(); row_labels.len()];
        Operator { ring, row_labels, col_labels, rows }
    }

    /// Builds an operator from `(row, col, value)` triplets; repeated
    /// positions are summed.
    pub fn from_entries<I>(ring: ScalarRing, row_labels: Vec<String>, col_labels: Vec<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, ExactScalar)>,
    {
        let (nr, nc) = (row_labels.len(), col_labels.len());
        let mut rows: Vec<Vec<(usize, ExactScalar)>> = vec![Vec::new(); nr];
        for (i, j, v) in entries {
            if i >= nr || j >= nc {
                return Err(Error::DimensionMismatch(format!("entry ({i}, {j}) outside {nr}x{nc}")));
            }
            if v.base_q() != ring.q() {
                return Err(Error::BaseMismatch(ring.q(), v.base_q()));
            }
            rows[i].push((j, v));
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|(j, _)| *j);
            let mut merged: Vec<(usize, ExactScalar)> = Vec::with_capacity(row.len());
            for (j, v) in row.drain(..) {
                match merged.last_mut() {
                    Some((lj, lv)) if *lj == j => *lv += &v,
                    _ => merged.push((j, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            *row = merged;
        }
        Ok(Operator { ring, row_labels, col_labels, rows })
    }

    pub fn identity_in(ring: ScalarRing, labels: Vec<String>) -> Self {
        let one = ExactScalar::integer_in(ring, 1);
        let rows = (0..labels.len()).map(|i| vec![(i, one.clone())]).collect();
        Operator { ring, row_labels: labels.clone(), col_labels: labels, rows }
    }

    pub fn diagonal_in(ring: ScalarRing, labels: Vec<String>, diag: Vec<ExactScalar>) -> Result<Self> {
        if diag.len() != labels.len() {
            return Err(Error::DimensionMismatch("diagonal length".into()));
        }
        let entries: Vec<_> = diag.into_iter().enumerate().map(|(i, v)| (i, i, v)).collect();
        Self::from_entries(ring, labels.clone(), labels, entries)
    }

    pub fn ring(&self) -> ScalarRing {
        self.ring
    }

    pub fn base_q(&self) -> u32 {
        self.ring.q()
    }

    pub fn nrows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn with_labels(mut self, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        if row_labels.len() != self.nrows() || col_labels.len() != self.ncols() {
            return Err(Error::DimensionMismatch("relabeling changes the shape".into()));
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    pub fn row(&self, i: usize) -> &[(usize, ExactScalar)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> ExactScalar {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(pos) => self.rows[i][pos].1.clone(),
            Err(_) => ExactScalar::zero_in(self.ring),
        }
    }

    /// Nonzero entries in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &ExactScalar)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn first_nonzero(&self) -> Option<(usize, usize, ExactScalar)> {
        self.nonzeros().next().map(|(i, j, v)| (i, j, v.clone()))
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn transpose(&self) -> Self {
        let entries: Vec<_> = self.nonzeros().map(|(i, j, v)| (j, i, v.clone())).collect();
        Self::from_entries(self.ring, self.col_labels.clone(), self.row_labels.clone(), entries)
            .expect("transpose keeps entries in range")
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::BaseMismatch(self.base_q(), other.base_q()));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        if self.ncols() != other.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        let mut acc: Vec<Option<ExactScalar>> = vec![None; other.ncols()];
        let mut touched: Vec<usize> = Vec::new();
        let mut rows = Vec::with_capacity(self.nrows());
        for row in &self.rows {
            for (k, a) in row {
                for (j, b) in &other.rows[*k] {
                    let prod = a * b;
                    match &mut acc[*j] {
                        Some(v) => *v += &prod,
                        slot @ None => {
                            *slot = Some(prod);
                            touched.push(*j);
                        }
                    }
                }
            }
            touched.sort_unstable();
            let mut out_row = Vec::with_capacity(touched.len());
            for &j in &touched {
                let v = acc[j].take().unwrap();
                if !v.is_zero() {
                    out_row.push((j, v));
                }
            }
            touched.clear();
            rows.push(out_row);
        }
        Ok(Operator {
            ring: self.ring,
            row_labels: self.row_labels.clone(),
            col_labels: other.col_labels.clone(),
            rows,
        })
    }

    fn combine(&self, other: &Self, subtract: bool) -> Result<Self> {
        self.check_ring(other)?;
        if self.nrows() != other.nrows() || self.ncols() != other.ncols() {
            return Err(Error::DimensionMismatch("sum of operators of different shapes".into()));
        }
        let mut entries: Vec<(usize, usize, ExactScalar)> =
            self.nonzeros().map(|(i, j, v)| (i, j, v.clone())).collect();
        entries.extend(other.nonzeros().map(|(i, j, v)| (i, j, if subtract { -v } else { v.clone() })));
        Self::from_entries(self.ring, self.row_labels.clone(), self.col_labels.clone(), entries)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    pub fn scale(&self, c: &ExactScalar) -> Result<Self> {
        if c.base_q() != self.base_q() {
            return Err(Error::BaseMismatch(self.base_q(), c.base_q()));
        }
        let entries: Vec<_> = self.nonzeros().map(|(i, j, v)| (i, j, v * c)).collect();
        Self::from_entries(self.ring, self.row_labels.clone(), self.col_labels.clone(), entries)
    }

    /// Kronecker product; labels are concatenated.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let cat = |a: &[String], b: &[String]| -> Vec<String> {
            a.iter().flat_map(|x| b.iter().map(move |y| format!("{x}{y}"))).collect()
        };
        let (onr, onc) = (other.nrows(), other.ncols());
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.nonzeros() {
            for (k, l, b) in other.nonzeros() {
                entries.push((i * onr + k, j * onc + l, a * b));
            }
        }
        Self::from_entries(
            self.ring,
            cat(&self.row_labels, &other.row_labels),
            cat(&self.col_labels, &other.col_labels),
            entries,
        )
    }

    /// Whether `self == other` entrywise (labels ignored).
    pub fn same_entries(&self, other: &Self) -> bool {
        self.ring == other.ring && self.rows == other.rows && self.ncols() == other.ncols()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.nonzeros().all(|(i, j, v)| &self.get(j, i) == v)
    }

    pub fn max_abs_f64(&self) -> f64 {
        self.nonzeros().map(|(_, _, v)| v.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn to_dense_f64(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows(), self.ncols());
        for (i, j, v) in self.nonzeros() {
            m[(i, j)] = v.to_f64();
        }
        m
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            schema: MATRIX_SCHEMA.to_string(),
            base_q: self.base_q(),
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
            entries: self.nonzeros().map(|(i, j, v)| (i, j, v.to_string())).collect(),
        }
    }

    pub fn from_json(m: &MatrixJson) -> Result<Self> {
        if m.schema != MATRIX_SCHEMA {
            return Err(Error::Parse(format!("unknown matrix schema {:?}", m.schema)));
        }
        let ring = ScalarRing::new(m.base_q)?;
        let entries = m
            .entries
            .iter()
            .map(|(i, j, s)| Ok((*i, *j, ExactScalar::parse(m.base_q, s)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(ring, m.row_labels.clone(), m.col_labels.clone(), entries)
    }
}

/// On-disk matrix format: nonzero entries in row-major order with
/// coefficients written as `"c0|c1|c2|c3"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub schema: String,
    pub base_q: u32,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub entries: Vec<(usize, usize, String)>,
}

pub fn export_matrix(op: &Operator, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&op.to_json())?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn import_matrix(path: &Path) -> Result<Operator> {
    let text = fs::read_to_string(path)?;
    let m: MatrixJson = serde_json::from_str(&text)?;
    Operator::from_json(&m)
}

/// Labels `"0"`, `"1"`, ... for anonymous index sets.
pub fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::QuarterInt;

    fn ring(q: u32) -> ScalarRing {
        ScalarRing::new(q).unwrap()
    }

    #[test]
    fn product_and_identity() {
        let r = ring(2);
        let s = ExactScalar::power(r, QuarterInt::quarters(1));
        let a = Operator::from_entries(
            r,
            index_labels(2),
            index_labels(2),
            vec![(0, 1, s.clone()), (1, 0, s.clone())],
        )
        .unwrap();
        let id = Operator::identity_in(r, index_labels(2));
        assert!(a.try_mul(&id).unwrap().same_entries(&a));
        let sq = a.try_mul(&a).unwrap();
        let half = ExactScalar::power(r, QuarterInt::halves(1));
        assert!(sq.same_entries(&id.scale(&half).unwrap()));
        assert!(a.try_sub(&a).unwrap().is_zero());
    }

    #[test]
    fn kron_shape() {
        let r = ring(3);
        let sx = Operator::from_entries(
            r,
            vec!["0".into(), "1".into()],
            vec!["0".into(), "1".into()],
            vec![(0, 1, ExactScalar::integer_in(r, 1)), (1, 0, ExactScalar::integer_in(r, 1))],
        )
        .unwrap();
        let k = sx.kron(&sx).unwrap();
        assert_eq!(k.nrows(), 4);
        assert_eq!(k.row_labels(), &["00", "01", "10", "11"]);
        assert_eq!(k.nonzeros().map(|(i, j, _)| (i, j)).collect::<Vec<_>>(), vec![(0, 3), (1, 2), (2, 1), (3, 0)]);
    }

    #[test]
    fn mismatched_shapes_and_bases() {
        let a = Operator::zeros(2, index_labels(2), index_labels(3)).unwrap();
        let b = Operator::zeros(2, index_labels(2), index_labels(3)).unwrap();
        assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch(_))));
        let c = Operator::zeros(3, index_labels(2), index_labels(3)).unwrap();
        assert!(matches!(a.try_add(&c), Err(Error::BaseMismatch(2, 3))));
    }

    #[test]
    fn json_round_trip() {
        let r = ring(5);
        let entries = vec![
            (0, 0, ExactScalar::power(r, QuarterInt::quarters(-3))),
            (1, 2, ExactScalar::rational_in(r, num_rational::BigRational::new((-7).into(), 3.into()))),
        ];
        let op = Operator::from_entries(r, index_labels(2), index_labels(3), entries).unwrap();
        let dir = std::env::temp_dir().join(format!("qlab-op-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.json");
        export_matrix(&op, &path).unwrap();
        assert_eq!(import_matrix(&path).unwrap(), op);

        let empty = Operator::zeros(2, index_labels(0), index_labels(0)).unwrap();
        assert!(empty.to_json().entries.is_empty());
        assert_eq!(Operator::from_json(&empty.to_json()).unwrap(), empty);
        std::fs::remove_dir_all(&dir).ok();
    }
}
