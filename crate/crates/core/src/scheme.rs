//! Symmetric association schemes given by their 0/1 matrices: structure
//! constants, eigenvalues, idempotents, eigenmatrices, Krein parameters and
//! dual adjacency matrices, all in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dense::{IntMatrix, RatMatrix, SparseAdj, SpanBasis};
use crate::error::{Error, Result};
use crate::poly::{minimal_polynomial, RatPoly};
use crate::report::{Check, Report};

/// `p[i][j][k] = p_ij^k`.
pub type PTable = Vec<Vec<Vec<i128>>>;
/// `q[i][j][k] = q_ij^k`.
pub type KreinTable = Vec<Vec<Vec<BigRational>>>;

/// Vertex-count bound for the Terwilliger dimension count.
pub const TERWILLIGER_MAX_VERTICES: usize = 64;

fn rat(v: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn violation(axiom: &str, witness: String) -> Error {
    Error::AxiomViolation { axiom: axiom.into(), witness }
}

/// Checks `A_0 = I`, `sum A_i = J`, symmetry, and closure
/// `A_i A_j = sum_k p_ij^k A_k`, returning the structure constants.
pub fn verify_axioms(mats: &[IntMatrix]) -> Result<PTable> {
    let Some(first) = mats.first() else {
        return Err(violation("nonempty", "no matrices".into()));
    };
    let n = first.n();
    if mats.iter().any(|m| m.n() != n) {
        return Err(Error::DimensionMismatch("scheme matrices differ in size".into()));
    }
    if *first != IntMatrix::identity(n) {
        return Err(violation("A_0 = I", "A_0".into()));
    }
    // Class of each entry; also checks 0/1 entries and the partition of J.
    let mut class = vec![usize::MAX; n * n];
    for (i, m) in mats.iter().enumerate() {
        for (p, &v) in m.entries().iter().enumerate() {
            match v {
                0 => {}
                1 if class[p] == usize::MAX => class[p] = i,
                1 => return Err(violation("sum A_i = J", format!("entry ({}, {}) covered twice", p / n, p % n))),
                _ => return Err(violation("0/1 entries", format!("A_{i} entry ({}, {}) = {v}", p / n, p % n))),
            }
        }
    }
    if let Some(p) = class.iter().position(|&c| c == usize::MAX) {
        return Err(violation("sum A_i = J", format!("entry ({}, {}) uncovered", p / n, p % n)));
    }
    for (i, m) in mats.iter().enumerate() {
        if !m.is_symmetric() {
            return Err(violation("symmetry", format!("A_{i}")));
        }
    }
    let d = mats.len();
    let sparse: Vec<SparseAdj> = mats.iter().map(SparseAdj::from_dense).collect::<Result<_>>()?;
    let mut p = vec![vec![vec![0i128; d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            let prod = sparse[i].mul_dense(&mats[j]);
            let mut seen: Vec<Option<i128>> = vec![None; d];
            for (pos, &v) in prod.entries().iter().enumerate() {
                let k = class[pos];
                match seen[k] {
                    None => seen[k] = Some(v),
                    Some(w) if w == v => {}
                    Some(w) => {
                        return Err(violation(
                            "closure",
                            format!("A_{i} A_{j} is not constant on A_{k}: {w} vs {v} at ({}, {})", pos / n, pos % n),
                        ))
                    }
                }
            }
            for k in 0..d {
                p[i][j][k] = seen[k].unwrap_or(0);
            }
        }
    }
    Ok(p)
}

/// Distinct eigenvalues of `A_1`, descending, from the integer roots of its
/// minimal polynomial.
pub fn eigenvalues_of_a1(mats: &[IntMatrix]) -> Result<Vec<BigRational>> {
    let a1 = mats.get(1).ok_or_else(|| Error::OutOfRange("scheme has no A_1".into()))?;
    let minpoly = minimal_polynomial(a1, mats.len())?;
    let (mut roots, rest) = minpoly.integer_roots(a1.max_abs_row_sum());
    if rest.degree() != Some(0) {
        return Err(Error::NonRationalEigenvalue);
    }
    roots.sort_by(|a, b| b.cmp(a));
    Ok(roots)
}

/// Everything derived from the scheme matrices.
#[derive(Clone, Debug)]
pub struct SchemeData {
    pub mats: Vec<IntMatrix>,
    pub p: PTable,
    pub eigenvalues: Vec<BigRational>,
    pub idempotents: Vec<RatMatrix>,
    /// `pmat[j][i] = p_i(j)`.
    pub pmat: Vec<Vec<BigRational>>,
    /// `qmat[i][j] = q_j(i)`, so `P Q = |X| I`.
    pub qmat: Vec<Vec<BigRational>>,
    pub krein: KreinTable,
}

impl SchemeData {
    pub fn vertices(&self) -> usize {
        self.mats[0].n()
    }

    pub fn classes(&self) -> usize {
        self.mats.len() - 1
    }

    pub fn multiplicities(&self) -> Vec<BigRational> {
        self.idempotents.iter().map(RatMatrix::trace).collect()
    }

    pub fn build(mats: Vec<IntMatrix>) -> Result<Self> {
        let p = verify_axioms(&mats)?;
        let eigenvalues = eigenvalues_of_a1(&mats)?;
        let idempotents = idempotents(&mats, &eigenvalues)?;
        let (pmat, qmat) = eigenmatrices(&mats, &idempotents)?;
        let krein = krein_parameters(&idempotents)?;
        Ok(SchemeData { mats, p, eigenvalues, idempotents, pmat, qmat, krein })
    }
}

/// `E_j = prod_{l != j} (A_1 - theta_l I) / (theta_j - theta_l)`. Requires
/// `A_1` to generate the algebra, i.e. as many eigenvalues as matrices.
pub fn idempotents(mats: &[IntMatrix], eigenvalues: &[BigRational]) -> Result<Vec<RatMatrix>> {
    if eigenvalues.len() != mats.len() {
        return Err(Error::OutOfRange(format!(
            "A_1 has {} distinct eigenvalues but the scheme has {} matrices; A_1 does not generate the algebra, so the Lagrange construction does not apply",
            eigenvalues.len(),
            mats.len()
        )));
    }
    let a1 = SparseAdj::from_dense(&mats[1])?;
    let mut powers = vec![IntMatrix::identity(mats[0].n())];
    for _ in 1..eigenvalues.len() {
        let next = a1.mul_dense(powers.last().unwrap());
        powers.push(next);
    }
    eigenvalues
        .iter()
        .enumerate()
        .map(|(j, tj)| {
            let mut poly = RatPoly::constant(BigRational::one());
            for (l, tl) in eigenvalues.iter().enumerate() {
                if l != j {
                    poly = poly.mul(&RatPoly::linear(BigRational::one(), -tl.clone())).scale(&(tj - tl).recip());
                }
            }
            poly.eval_rational(&powers)
        })
        .collect()
}

/// Rows indexed by idempotent, columns by class.
pub type Eigenmatrix = Vec<Vec<BigRational>>;

/// `P[j][i] = tr(A_i E_j) / m_j` and `Q = |X| P^{-1}`.
pub fn eigenmatrices(mats: &[IntMatrix], idem: &[RatMatrix]) -> Result<(Eigenmatrix, Eigenmatrix)> {
    let n = mats[0].n();
    let d = mats.len();
    let mut pmat = vec![vec![BigRational::zero(); d]; d];
    for (j, e) in idem.iter().enumerate() {
        let m = e.trace();
        for (i, a) in mats.iter().enumerate() {
            // tr(A_i E_j) = sum over (x, y) with A_i[x][y] = 1 of E_j[y][x].
            let mut t = BigRational::zero();
            for x in 0..n {
                for y in 0..n {
                    if a.get(x, y) != 0 {
                        t += e.get(y, x);
                    }
                }
            }
            pmat[j][i] = t / &m;
        }
    }
    let pm = RatMatrix::from_fn(d, |j, i| pmat[j][i].clone());
    let inv = pm.inverse().ok_or(Error::SingularP)?;
    let size = rat(n as i128);
    let qmat = (0..d).map(|i| (0..d).map(|j| inv.get(i, j) * &size).collect()).collect();
    Ok((pmat, qmat))
}

/// `q_ij^k = |X| / m_k sum_{x,y} (E_i)_{xy} (E_j)_{xy} (E_k)_{xy}`, then
/// checks the expansion `E_i o E_j = |X|^{-1} sum_k q_ij^k E_k` exactly.
pub fn krein_parameters(idem: &[RatMatrix]) -> Result<KreinTable> {
    let d = idem.len();
    let size = rat(idem[0].n() as i128);
    let m: Vec<BigRational> = idem.iter().map(RatMatrix::trace).collect();
    let mut out = vec![vec![vec![BigRational::zero(); d]; d]; d];
    for i in 0..d {
        for j in i..d {
            let had = idem[i].hadamard(&idem[j]);
            let mut recon = RatMatrix::zeros(idem[0].n());
            for k in 0..d {
                let v = RatMatrix::triple_sum(&idem[i], &idem[j], &idem[k]) * &size / &m[k];
                recon = recon.add(&idem[k].scale(&(&v / &size)));
                out[i][j][k] = v.clone();
                out[j][i][k] = v;
            }
            if recon != had {
                return Err(Error::InconsistentExpansion { i, j });
            }
        }
    }
    Ok(out)
}

/// `A_i* = diag(|X| (E_i)_{x, x0})`, as vectors of diagonal entries.
pub fn dual_adjacency(s: &SchemeData, x0: usize) -> Vec<Vec<BigRational>> {
    let size = rat(s.vertices() as i128);
    s.idempotents.iter().map(|e| (0..s.vertices()).map(|x| e.get(x, x0) * &size).collect()).collect()
}

/// Natural order and its reversal (with index 0 fixed).
fn orderings(d: usize) -> [(&'static str, Vec<usize>); 2] {
    let natural: Vec<usize> = (0..d).collect();
    let mut reversed = vec![0];
    reversed.extend((1..d).rev());
    [("natural", natural), ("reversed", reversed)]
}

/// Tridiagonality of `t[1][i][k]` under `order`, with nonzero
/// superdiagonal so the three-term recurrence closes.
fn tridiagonal<T: Zero>(t: &[Vec<Vec<T>>], order: &[usize]) -> bool {
    let d = order.len();
    if d < 2 {
        return true;
    }
    let one = order[1];
    (0..d).all(|i| {
        (0..d).all(|k| {
            let v = &t[one][order[i]][order[k]];
            let near = i.abs_diff(k) <= 1;
            if !near {
                v.is_zero()
            } else if k == i + 1 {
                !v.is_zero()
            } else {
                true
            }
        })
    })
}

pub fn is_p_polynomial(p: &PTable) -> bool {
    tridiagonal(p, &(0..p.len()).collect::<Vec<_>>())
}

/// The first ordering of the idempotents (natural, then reversed) under
/// which the Krein table is tridiagonal.
pub fn q_polynomial_ordering(krein: &KreinTable) -> Option<&'static str> {
    orderings(krein.len()).into_iter().find(|(_, o)| tridiagonal(krein, o)).map(|(name, _)| name)
}

fn matrix_check(name: &str, residual: &RatMatrix) -> Check {
    match residual.first_nonzero() {
        None => Check::pass(name),
        Some((i, j, v)) => Check::fail(name, v.to_string(), Some(format!("entry ({i}, {j})"))),
    }
}

fn strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

#[derive(Serialize)]
struct TableData {
    p: PTable,
    eigenvalues: Vec<String>,
    multiplicities: Vec<String>,
    krein: Vec<Vec<Vec<String>>>,
}

/// Runs the whole toolkit and reports every identity it relies on.
pub fn check_scheme(mats: Vec<IntMatrix>) -> Result<(Report, Option<SchemeData>)> {
    let mut report = Report::new();
    let s = match SchemeData::build(mats) {
        Ok(s) => s,
        Err(e @ (Error::AxiomViolation { .. } | Error::NonRationalEigenvalue | Error::InconsistentExpansion { .. } | Error::SingularP)) => {
            report.push(Check::fail("scheme/build", "nonzero", Some(e.to_string())));
            return Ok((report, None));
        }
        Err(e) => return Err(e),
    };
    report.push(Check::pass("scheme/axioms"));
    let n = s.vertices();
    let d = s.mats.len();
    let size = rat(n as i128);

    // Idempotents.
    let id = RatMatrix::identity(n);
    let mut sum = RatMatrix::zeros(n);
    let mut orth = None;
    for (i, ei) in s.idempotents.iter().enumerate() {
        sum = sum.add(ei);
        for (j, ej) in s.idempotents.iter().enumerate() {
            let prod = ei.mul(ej);
            let expected = if i == j { ei.clone() } else { RatMatrix::zeros(n) };
            if prod != expected && orth.is_none() {
                orth = Some(format!("E_{i} E_{j}"));
            }
        }
    }
    report.push(Check::holds("idempotents/orthogonal", orth.is_none(), || orth.clone().unwrap_or_default()));
    report.push(matrix_check("idempotents/complete", &sum.sub(&id)));
    report.push(Check::holds("idempotents/symmetric", s.idempotents.iter().all(RatMatrix::is_symmetric), || {
        "some E_j is not symmetric".into()
    }));
    let j_over_n = RatMatrix::from_fn(n, |_, _| size.recip());
    report.push(matrix_check("idempotents/e0_is_j_over_n", &s.idempotents[0].sub(&j_over_n)));

    // Eigenmatrices: reconstruction and PQ = |X| I.
    let mut recon_a = None;
    for (i, a) in s.mats.iter().enumerate() {
        let r = s.idempotents.iter().enumerate().fold(RatMatrix::zeros(n), |acc, (j, e)| acc.add(&e.scale(&s.pmat[j][i])));
        if r != a.to_rational() && recon_a.is_none() {
            recon_a = Some(format!("A_{i}"));
        }
    }
    report.push(Check::holds("eigenmatrices/a_from_idempotents", recon_a.is_none(), || recon_a.clone().unwrap_or_default()));
    let mut recon_e = None;
    for (j, e) in s.idempotents.iter().enumerate() {
        let r = s
            .mats
            .iter()
            .enumerate()
            .fold(RatMatrix::zeros(n), |acc, (i, a)| acc.add(&a.to_rational().scale(&(&s.qmat[i][j] / &size))));
        if r != *e && recon_e.is_none() {
            recon_e = Some(format!("E_{j}"));
        }
    }
    report.push(Check::holds("eigenmatrices/e_from_distance_matrices", recon_e.is_none(), || recon_e.clone().unwrap_or_default()));
    let pm = RatMatrix::from_fn(d, |a, b| s.pmat[a][b].clone());
    let qm = RatMatrix::from_fn(d, |a, b| s.qmat[a][b].clone());
    report.push(matrix_check("eigenmatrices/pq_is_n_identity", &pm.mul(&qm).sub(&RatMatrix::identity(d).scale(&size))));
    let mult = s.multiplicities();
    let first_col_ok = (0..d).all(|i| s.qmat[i][0].is_one());
    let first_row_ok = (0..d).all(|j| s.qmat[0][j] == mult[j] && !mult[j].is_negative());
    report.push(Check::holds("eigenmatrices/q_first_column_ones", first_col_ok, || "Q[i][0] != 1".into()));
    report.push(Check::holds("eigenmatrices/q_first_row_multiplicities", first_row_ok, || "Q[0][j] != m_j".into()));
    let valency_row = (0..d).all(|i| s.pmat[0][i] == rat(s.p[i][i][0]));
    report.push(Check::holds("eigenmatrices/p_first_row_valencies", valency_row, || "P[0][i] != k_i".into()));

    // Krein parameters.
    let neg = s.krein.iter().flatten().flatten().any(Signed::is_negative);
    report.push(Check::holds("krein/nonnegative", !neg, || "negative Krein parameter".into()));
    let q0 = (0..d).all(|j| (0..d).all(|k| s.krein[0][j][k] == if j == k { BigRational::one() } else { BigRational::zero() }));
    report.push(Check::holds("krein/q0_is_delta", q0, || "q_0j^k != delta_jk".into()));

    // Dual Bose-Mesner relations at base vertex 0.
    let dual = dual_adjacency(&s, 0);
    let mut dual_ok = dual[0].iter().all(One::is_one);
    for i in 0..d {
        for j in 0..d {
            for (x, (u, v)) in dual[i].iter().zip(&dual[j]).enumerate() {
                let lhs = u * v;
                let rhs: BigRational = (0..d).map(|k| &s.krein[i][j][k] * &dual[k][x]).sum();
                dual_ok &= lhs == rhs;
            }
        }
    }
    report.push(Check::holds("dual/bose_mesner_relations", dual_ok, || "A_i* A_j* != sum_k q_ij^k A_k*".into()));
    let col_sum_ok = (0..n).all(|x| {
        let s: BigRational = dual.iter().map(|v| v[x].clone()).sum();
        s == if x == 0 { size.clone() } else { BigRational::zero() }
    });
    report.push(Check::holds("dual/sum_is_n_delta", col_sum_ok, || "sum_i A_i* != |X| delta_{x,x0}".into()));

    // Polynomial structure.
    report.push(Check::holds("polynomial/p_polynomial", is_p_polynomial(&s.p), || "p_1i^k not tridiagonal".into()));
    let qord = q_polynomial_ordering(&s.krein);
    report.push(Check::holds("polynomial/q_polynomial", qord.is_some(), || "q_1i^k not tridiagonal in natural or reversed order".into()));
    report.insert("q_polynomial_ordering", qord.unwrap_or("none"));

    if n <= TERWILLIGER_MAX_VERTICES {
        let (gen_dim, mono_dim, contained) = terwilliger_dimensions(&s, &dual)?;
        report.insert("terwilliger_algebra_dim", gen_dim);
        report.insert("monomial_span_dim", mono_dim);
        report.push(Check::holds("terwilliger/monomials_in_generated_algebra", contained && gen_dim >= mono_dim, || {
            format!("generated dim {gen_dim}, monomial span dim {mono_dim}")
        }));
    } else {
        report.push(Check::skip("terwilliger/monomials_in_generated_algebra", format!("more than {TERWILLIGER_MAX_VERTICES} vertices")));
    }

    report.insert(
        "tables",
        TableData {
            p: s.p.clone(),
            eigenvalues: strings(&s.eigenvalues),
            multiplicities: strings(&mult),
            krein: s.krein.iter().map(|a| a.iter().map(|b| strings(b)).collect()).collect(),
        },
    );
    Ok((report, Some(s)))
}

/// Dimension of the algebra generated by `A_1` and `A_1*`, dimension of the
/// span of the monomials `A_i A_j* A_k`, and whether the latter lies in the former.
pub fn terwilliger_dimensions(s: &SchemeData, dual: &[Vec<BigRational>]) -> Result<(usize, usize, bool)> {
    let n = s.vertices();
    let flat = |m: &RatMatrix| m.entries().to_vec();
    let diag = |v: &[BigRational]| RatMatrix::from_fn(n, |x, y| if x == y { v[x].clone() } else { BigRational::zero() });
    let a1 = s.mats[1].to_rational();
    let a1s = diag(&dual[1]);
    let mut algebra = SpanBasis::new();
    let mut frontier = vec![RatMatrix::identity(n)];
    algebra.insert(flat(&frontier[0]));
    while let Some(m) = frontier.pop() {
        for g in [&a1, &a1s] {
            let next = g.mul(&m);
            if algebra.insert(flat(&next)) {
                frontier.push(next);
            }
        }
    }
    let mut monomials = SpanBasis::new();
    let mut contained = true;
    let mats: Vec<RatMatrix> = s.mats.iter().map(IntMatrix::to_rational).collect();
    for ai in &mats {
        for dj in dual {
            let left = ai.mul(&diag(dj));
            for ak in &mats {
                let m = flat(&left.mul(ak));
                contained &= algebra.contains(&m);
                monomials.insert(m);
            }
        }
    }
    Ok((algebra.dim(), monomials.dim(), contained))
}

/// Two-class scheme on `cliques` disjoint copies of `K_size`.
pub fn disjoint_cliques_scheme(cliques: usize, size: usize) -> Vec<IntMatrix> {
    let n = cliques * size;
    let same = |x: usize, y: usize| x / size == y / size;
    vec![
        IntMatrix::identity(n),
        IntMatrix::from_fn(n, |x, y| (x != y && same(x, y)) as i128),
        IntMatrix::from_fn(n, |x, y| (!same(x, y)) as i128),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::hamming_distance_matrices;

    fn hamming(n: usize) -> Vec<IntMatrix> {
        hamming_distance_matrices(n).unwrap().matrices()
    }

    #[test]
    fn hamming_passes() {
        for n in 1..=3 {
            let (report, s) = check_scheme(hamming(n)).unwrap();
            assert!(report.all_passed(), "n={n}: {:?}", report.failures().collect::<Vec<_>>());
            let s = s.unwrap();
            let expected: Vec<BigRational> = (0..=n as i128).map(|j| rat(n as i128 - 2 * j)).collect();
            assert_eq!(s.eigenvalues, expected);
            assert_eq!(report.data["q_polynomial_ordering"], serde_json::json!("natural"));
        }
    }

    #[test]
    fn hamming_1_eigenmatrices() {
        let s = SchemeData::build(hamming(1)).unwrap();
        let expected = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
        assert_eq!(s.pmat, expected);
        assert_eq!(s.qmat, expected);
    }

    #[test]
    fn hamming_2_ranks() {
        let s = SchemeData::build(hamming(2)).unwrap();
        assert_eq!(s.multiplicities(), vec![rat(1), rat(2), rat(1)]);
    }

    #[test]
    fn triangle() {
        let mats = vec![IntMatrix::identity(3), IntMatrix::from_fn(3, |i, j| (i != j) as i128)];
        let s = SchemeData::build(mats).unwrap();
        assert_eq!(s.eigenvalues, vec![rat(2), rat(-1)]);
        assert_eq!(s.idempotents[0], RatMatrix::from_fn(3, |_, _| BigRational::new(1.into(), 3.into())));
    }

    #[test]
    fn permutation_breaks_closure() {
        let mut mats = hamming(2);
        // A transposition-free permutation in place of A_2.
        mats[2] = IntMatrix::from_fn(4, |x, y| (y == (x + 1) % 4) as i128);
        assert!(matches!(verify_axioms(&mats), Err(Error::AxiomViolation { .. })));
        let (report, s) = check_scheme(mats).unwrap();
        assert!(s.is_none() && !report.all_passed());
    }

    #[test]
    fn disjoint_cliques_not_p_polynomial() {
        let mats = disjoint_cliques_scheme(3, 3);
        let p = verify_axioms(&mats).unwrap();
        assert!(!is_p_polynomial(&p));
        // A_1 has only two eigenvalues, so the Lagrange construction is refused.
        let ev = eigenvalues_of_a1(&mats).unwrap();
        assert_eq!(ev.len(), 2);
        assert!(idempotents(&mats, &ev).is_err());
    }

    #[test]
    fn dual_adjacency_identity_first() {
        let s = SchemeData::build(hamming(2)).unwrap();
        let dual = dual_adjacency(&s, 0);
        assert!(dual[0].iter().all(One::is_one));
        // A_1* = diag(N - 2 wt(x)) for the Hamming scheme.
        assert_eq!(dual[1], vec![rat(2), rat(0), rat(0), rat(-2)]);
    }
}

#[cfg(test)]
mod dual_polar_tests {
    use super::*;
    use crate::dualpolar::{build_dual_polar, DEFAULT_LAGRANGIAN_LIMIT};
    use crate::field::Field;

    #[test]
    fn dual_polar_schemes() {
        for (d, q, spectrum) in [(1, 2, vec![2, -1]), (2, 2, vec![6, 1, -3]), (2, 3, vec![12, 2, -4])] {
            let g = build_dual_polar(d, &Field::new(q).unwrap(), DEFAULT_LAGRANGIAN_LIMIT).unwrap();
            let (report, s) = check_scheme(g.table.matrices()).unwrap();
            assert!(report.all_passed(), "d={d} q={q}: {:?}", report.failures().collect::<Vec<_>>());
            let expected: Vec<BigRational> = spectrum.into_iter().map(rat).collect();
            assert_eq!(s.unwrap().eigenvalues, expected);
        }
    }
}
