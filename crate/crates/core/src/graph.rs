//! Graphs stored through their full distance table, from which the
//! distance matrices `A_0, ..., A_D` are produced on demand.

use crate::dense::{IntMatrix, SparseAdj};
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::scalar::{ExactScalar, ScalarRing};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceTable {
    labels: Vec<String>,
    diameter: usize,
    dist: Vec<u8>,
}

impl DistanceTable {
    /// Builds the table from a symmetric distance function.
    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> usize + Sync) -> Result<Self> {
        let n = labels.len();
        let dist = Self::evaluate(n, &f, |x, y| (x, y));
        Self::validated(labels, dist)
    }

    /// As [`DistanceTable::from_fn`], evaluating `f` only for `y <= x` and
    /// mirroring, so symmetry holds by construction.
    pub fn from_symmetric_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> usize + Sync) -> Result<Self> {
        let n = labels.len();
        let dist = Self::evaluate(n, &f, |x, y| if y <= x { (x, y) } else { (y, x) });
        Self::validated(labels, dist)
    }

    fn evaluate(n: usize, f: &(impl Fn(usize, usize) -> usize + Sync), order: fn(usize, usize) -> (usize, usize)) -> Vec<u8> {
        use rayon::prelude::*;
        let lower: Vec<Vec<u8>> = (0..n)
            .into_par_iter()
            .map(|x| (0..n).map(|y| if order(x, y) == (x, y) { f(x, y).min(u8::MAX as usize) as u8 } else { 0 }).collect())
            .collect();
        let mut dist = lower.concat();
        for x in 0..n {
            for y in 0..n {
                let (a, b) = order(x, y);
                if (a, b) != (x, y) {
                    dist[x * n + y] = dist[a * n + b];
                }
            }
        }
        dist
    }

    fn validated(labels: Vec<String>, dist: Vec<u8>) -> Result<Self> {
        let n = labels.len();
        let diameter = dist.iter().copied().max().unwrap_or(0) as usize;
        let t = DistanceTable { labels, diameter, dist };
        for x in 0..n {
            if t.distance(x, x) != 0 {
                return Err(Error::AxiomViolation { axiom: "A_0 = I".into(), witness: format!("vertex {x}") });
            }
            for y in 0..x {
                if t.distance(x, y) != t.distance(y, x) {
                    return Err(Error::AxiomViolation {
                        axiom: "symmetry".into(),
                        witness: format!("({x}, {y})"),
                    });
                }
            }
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    #[inline]
    pub fn distance(&self, x: usize, y: usize) -> usize {
        self.dist[x * self.len() + y] as usize
    }

    pub fn matrix(&self, i: usize) -> IntMatrix {
        IntMatrix::from_fn(self.len(), |x, y| (self.distance(x, y) == i) as i128)
    }

    pub fn matrices(&self) -> Vec<IntMatrix> {
        (0..=self.diameter).map(|i| self.matrix(i)).collect()
    }

    pub fn adjacency(&self, i: usize) -> SparseAdj {
        let n = self.len();
        SparseAdj::new(n, (0..n).map(|x| (0..n).filter(|&y| self.distance(x, y) == i).collect()).collect())
    }

    /// `A_i` as an exact 0/1 operator.
    pub fn operator(&self, i: usize, ring: ScalarRing) -> Result<Operator> {
        let one = ExactScalar::integer_in(ring, 1);
        let n = self.len();
        Operator::from_entries(
            ring,
            self.labels.clone(),
            self.labels.clone(),
            (0..n).flat_map(|x| (0..n).filter(move |&y| self.distance(x, y) == i).map(move |y| (x, y))).map(|(x, y)| (x, y, one.clone())),
        )
    }

    /// Number of vertices at distance `i` from vertex 0.
    pub fn valency(&self, i: usize) -> usize {
        (0..self.len()).filter(|&y| self.distance(0, y) == i).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph() {
        let labels: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let t = DistanceTable::from_fn(labels, |x, y| x.abs_diff(y)).unwrap();
        assert_eq!(t.diameter(), 2);
        assert_eq!(t.matrix(2).get(0, 2), 1);
        assert_eq!(t.adjacency(1).neighbors(1), &[0, 2]);
        assert_eq!(t.valency(1), 1);
        let op = t.operator(1, ScalarRing::new(2).unwrap()).unwrap();
        assert_eq!(op.nnz(), 4);
    }

    #[test]
    fn rejects_asymmetric() {
        let labels: Vec<String> = (0..2).map(|i| i.to_string()).collect();
        assert!(DistanceTable::from_fn(labels, |x, y| if x < y { 1 } else { 2 * (x != y) as usize }).is_err());
    }
}
