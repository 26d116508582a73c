//! Decomposition of the `C_d(q)` standard module under the abelian group of
//! unipotent maps `(x, y) -> (x, y + T x)`, `T` symmetric, and comparison of
//! each isotypic block with a weighted subspace lattice.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::dense::IntMatrix;
use crate::dualpolar::{lagrangian_count, DualPolarGraph, IsotropicVertex, SymplecticSpace};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::fq::{rref, subspace_count, MatFq, DEFAULT_SUBSPACE_LIMIT};
use crate::lattice::{build_lattice, build_rlke, build_y};
use crate::operator::Operator;
use crate::report::{Check, Report};
use crate::scalar::{ExactScalar, QuarterInt};

pub const DEFAULT_SYM_LIMIT: u128 = 100_000;
/// Tolerance for projector identities.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Largest vertex count for which the decomposition is attempted.
pub const MAX_WS_VERTICES: usize = 160;

type C64 = Complex<f64>;

/// A symmetric `d x d` matrix over `F_q` with its rank and type, plus the
/// rank and type of the quadratic form labelling its character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatFq {
    pub matrix: MatFq,
    pub rank: usize,
    pub eps: i8,
    pub form_rank: usize,
    pub form_eps: i8,
}

impl SymMatFq {
    pub fn new(matrix: MatFq, f: &Field) -> Result<Self> {
        if matrix.rows() != matrix.cols() || !matrix.is_symmetric() {
            return Err(Error::NotSymplectic);
        }
        let rank = matrix.rank(f);
        let eps = type_eps(&matrix, f);
        let (form_rank, form_eps) = form_invariants(&character_form(&matrix, f), f);
        Ok(SymMatFq { matrix, rank, eps, form_rank, form_eps })
    }

    pub fn d(&self) -> usize {
        self.matrix.rows()
    }

    pub fn label(&self) -> String {
        let rows: Vec<String> = (0..self.d())
            .map(|i| self.matrix.row(i).iter().map(|e| e.0.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        format!("[{}]", rows.join(";"))
    }
}

fn upper_positions(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect()
}

fn sym_from_digits(d: usize, digits: &[FieldElem]) -> MatFq {
    let mut m = MatFq::zeros(d, d);
    for (&(i, j), &v) in upper_positions(d).iter().zip(digits) {
        m.set(i, j, v);
        m.set(j, i, v);
    }
    m
}

fn sym_count(d: usize, q: u64) -> u128 {
    (q as u128).pow((d * (d + 1) / 2) as u32)
}

/// All symmetric matrices, ordered by their upper triangle read row by row
/// as base-`q` digits (first entry most significant).
pub fn enumerate_sym_matrices(d: usize, f: &Field, limit: u128) -> Result<Vec<SymMatFq>> {
    let count = sym_count(d, f.q());
    if count > limit {
        return Err(Error::LimitExceeded { size: count, limit });
    }
    let slots = d * (d + 1) / 2;
    let q = f.q() as usize;
    (0..count as usize)
        .map(|mut idx| {
            let mut digits = vec![FieldElem::ZERO; slots];
            for slot in digits.iter_mut().rev() {
                *slot = FieldElem((idx % q) as u8);
                idx /= q;
            }
            SymMatFq::new(sym_from_digits(d, &digits), f)
        })
        .collect()
}

fn det(m: &MatFq, f: &Field) -> FieldElem {
    let n = m.rows();
    let mut a = m.clone();
    let mut acc = FieldElem::ONE;
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a.get(r, c).is_zero()) else {
            return FieldElem::ZERO;
        };
        if p != c {
            for j in 0..n {
                let (x, y) = (a.get(c, j), a.get(p, j));
                a.set(c, j, y);
                a.set(p, j, x);
            }
            acc = f.neg(acc);
        }
        let pivot = a.get(c, c);
        acc = f.mul(acc, pivot);
        let inv = f.inv(pivot).expect("nonzero pivot");
        for r in c + 1..n {
            let factor = f.mul(a.get(r, c), inv);
            if factor.is_zero() {
                continue;
            }
            for j in c..n {
                let v = f.sub(a.get(r, j), f.mul(factor, a.get(c, j)));
                a.set(r, j, v);
            }
        }
    }
    acc
}

fn kernel(m: &MatFq, f: &Field) -> Vec<Vec<FieldElem>> {
    let r = rref(m, f);
    let n = m.cols();
    let pivots: Vec<usize> = (0..r.rows()).filter_map(|i| (0..n).find(|&j| !r.get(i, j).is_zero())).collect();
    (0..n)
        .filter(|j| !pivots.contains(j))
        .map(|free| {
            let mut v = vec![FieldElem::ZERO; n];
            v[free] = FieldElem::ONE;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(r.get(i, free));
            }
            v
        })
        .collect()
}

/// The nondegenerate block `Q` of `S`: the Gram matrix of `S` on a
/// complement of its radical, so that `U^T S U = diag(0, Q)` where the
/// columns of `U` are a radical basis followed by the complement.
pub fn congruence_block(s: &MatFq, f: &Field) -> MatFq {
    let d = s.rows();
    let mut basis = kernel(s, f);
    let mut complement = Vec::new();
    for i in 0..d {
        let mut e = vec![FieldElem::ZERO; d];
        e[i] = FieldElem::ONE;
        basis.push(e.clone());
        if crate::fq::rank_of(&basis, d, f) == basis.len() {
            complement.push(e);
        } else {
            basis.pop();
        }
    }
    let w = MatFq::from_rows(&complement, d);
    w.mul(s, f).mul(&w.transpose(), f)
}

/// `0` for odd rank; otherwise `+1` or `-1` as `(-1)^{r/2} det Q` is or is
/// not a square.
pub fn type_eps(s: &MatFq, f: &Field) -> i8 {
    let r = s.rank(f);
    if r % 2 == 1 {
        return 0;
    }
    if r == 0 {
        return 1;
    }
    let q = congruence_block(s, f);
    let mut v = det(&q, f);
    if (r / 2) % 2 == 1 {
        v = f.neg(v);
    }
    if f.is_square(v) {
        1
    } else {
        -1
    }
}

fn eval_form(c: &MatFq, x: &[FieldElem], f: &Field) -> FieldElem {
    let d = x.len();
    (0..d).fold(FieldElem::ZERO, |acc, i| {
        (0..d).fold(acc, |acc, j| f.add(acc, f.mul(c.get(i, j), f.mul(x[i], x[j]))))
    })
}

fn span(basis: &[Vec<FieldElem>], d: usize, f: &Field) -> Vec<Vec<FieldElem>> {
    let mut out = vec![vec![FieldElem::ZERO; d]];
    for b in basis {
        let prev = out.clone();
        for a in f.nonzero_elements() {
            out.extend(prev.iter().map(|v| v.iter().zip(b).map(|(&x, &y)| f.add(x, f.mul(a, y))).collect()));
        }
    }
    out
}

/// Coefficient matrix `C` of the quadratic form `x^T C x` whose polar data
/// labels the character of `S`: `S` itself in odd characteristic, its upper
/// triangle in characteristic 2.
pub fn character_form(s: &MatFq, f: &Field) -> MatFq {
    if f.characteristic() != 2 {
        return s.clone();
    }
    let d = s.rows();
    let mut c = MatFq::zeros(d, d);
    for (i, j) in upper_positions(d) {
        c.set(i, j, s.get(i, j));
    }
    c
}

/// Rank and type of the quadratic form `x^T C x`, found by counting. The
/// rank is `d` minus the dimension of the singular radical; for even rank
/// `r` the form on a complement has `q^{r-1} + eps (q^{r/2} - q^{r/2-1})`
/// zeros.
pub fn form_invariants(c: &MatFq, f: &Field) -> (usize, i8) {
    let d = c.rows();
    let q = f.q() as i128;
    let polar = {
        let mut b = MatFq::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                b.set(i, j, f.add(c.get(i, j), c.get(j, i)));
            }
        }
        b
    };
    let singular: Vec<Vec<FieldElem>> =
        span(&kernel(&polar, f), d, f).into_iter().filter(|x| eval_form(c, x, f).is_zero()).collect();
    let mut radical: Vec<Vec<FieldElem>> = Vec::new();
    for x in &singular {
        let mut t = radical.clone();
        t.push(x.clone());
        if crate::fq::rank_of(&t, d, f) == t.len() {
            radical = t;
        }
    }
    let r = d - radical.len();
    if r % 2 == 1 {
        return (r, 0);
    }
    if r == 0 {
        return (0, 1);
    }
    let mut basis = radical.clone();
    let mut complement = Vec::new();
    for i in 0..d {
        let mut e = vec![FieldElem::ZERO; d];
        e[i] = FieldElem::ONE;
        basis.push(e.clone());
        if crate::fq::rank_of(&basis, d, f) == basis.len() {
            complement.push(e);
        } else {
            basis.pop();
        }
    }
    let zeros = span(&complement, d, f).iter().filter(|x| eval_form(c, x, f).is_zero()).count() as i128;
    let h = r as u32 / 2;
    let excess = zeros - q.pow(r as u32 - 1);
    (r, (excess / (q.pow(h) - q.pow(h - 1))) as i8)
}

/// `(x, y) -> (x, y + T x)` applied to a Lagrangian.
pub fn unipotent_action(t: &MatFq, v: &IsotropicVertex, space: &SymplecticSpace) -> Result<IsotropicVertex> {
    let d = space.d;
    if t.rows() != d || t.cols() != d || !t.is_symmetric() {
        return Err(Error::NotSymplectic);
    }
    let f = &space.field;
    let rows: Vec<Vec<FieldElem>> = v
        .basis()
        .into_iter()
        .map(|mut row| {
            for i in 0..d {
                let tx = (0..d).fold(FieldElem::ZERO, |acc, j| f.add(acc, f.mul(t.get(i, j), row[j])));
                row[d + i] = f.add(row[d + i], tx);
            }
            row
        })
        .collect();
    Ok(IsotropicVertex::from_rref(&rref(&MatFq::from_rows(&rows, 2 * d), f)))
}

/// The character pairing `<S, T>` in the prime field. In odd characteristic
/// this is `tr(S T)`. In characteristic 2 the trace form is degenerate on
/// symmetric matrices, so the upper-triangle dot product is used instead.
pub fn pairing(s: &MatFq, t: &MatFq, f: &Field) -> FieldElem {
    let d = s.rows();
    let v = if f.characteristic() == 2 {
        upper_positions(d).into_iter().fold(FieldElem::ZERO, |acc, (i, j)| f.add(acc, f.mul(s.get(i, j), t.get(i, j))))
    } else {
        (0..d).fold(FieldElem::ZERO, |acc, i| {
            (0..d).fold(acc, |acc, j| f.add(acc, f.mul(s.get(i, j), t.get(j, i))))
        })
    };
    f.abs_trace(v)
}

/// The permutation representation of the unipotent group on the vertices
/// of a dual polar graph.
pub struct UnipotentRep {
    pub syms: Vec<SymMatFq>,
    /// `perms[t][v]` is the image of vertex `v` under `syms[t]`.
    pub perms: Vec<Vec<usize>>,
}

impl UnipotentRep {
    pub fn new(g: &DualPolarGraph, limit: u128) -> Result<Self> {
        let f = &g.space.field;
        let syms = enumerate_sym_matrices(g.d(), f, limit)?;
        let index: HashMap<&IsotropicVertex, usize> = g.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let perms = syms
            .par_iter()
            .map(|t| {
                g.vertices
                    .iter()
                    .map(|v| {
                        let w = unipotent_action(&t.matrix, v, &g.space)?;
                        index.get(&w).copied().ok_or(Error::NotSymplectic)
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(UnipotentRep { syms, perms })
    }

    /// Index of `syms[a] + syms[b]`.
    fn sum_index(&self, a: usize, b: usize, f: &Field) -> usize {
        let q = f.q() as usize;
        let d = self.syms[0].d();
        upper_positions(d).iter().fold(0, |acc, &(i, j)| {
            acc * q + f.add(self.syms[a].matrix.get(i, j), self.syms[b].matrix.get(i, j)).index()
        })
    }

    /// First `(T1, T2, v)` with `rho(T1) rho(T2) v != rho(T1 + T2) v`.
    pub fn composition_failure(&self, f: &Field) -> Option<(usize, usize, usize)> {
        let m = self.syms.len();
        (0..m).into_par_iter().find_map_first(|a| {
            (0..m).find_map(|b| {
                let c = self.sum_index(a, b, f);
                (0..self.perms[a].len())
                    .find(|&v| self.perms[a][self.perms[b][v]] != self.perms[c][v])
                    .map(|v| (a, b, v))
            })
        })
    }

    /// `P_S = q^{-d(d+1)/2} sum_T conj(psi(<S, T>)) rho(T)`.
    pub fn projector(&self, s: &SymMatFq, f: &Field) -> ComplexOperator {
        let n = self.perms[0].len();
        let p = f.characteristic();
        let scale = 1.0 / self.syms.len() as f64;
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (t, perm) in self.syms.iter().zip(&self.perms) {
            let k = pairing(&s.matrix, &t.matrix, f).index() as f64;
            let c = C64::from_polar(scale, -2.0 * PI * k / p as f64);
            for (v, &w) in perm.iter().enumerate() {
                m[(w, v)] += c;
            }
        }
        ComplexOperator { matrix: m }
    }

    /// `2^{d(d+1)/2} P_S` as an integer matrix, for `q = 2`.
    pub fn projector_scaled_q2(&self, s: &SymMatFq, f: &Field) -> IntMatrix {
        let n = self.perms[0].len();
        let mut m = IntMatrix::zeros(n);
        for (t, perm) in self.syms.iter().zip(&self.perms) {
            let sign = if pairing(&s.matrix, &t.matrix, f).is_zero() { 1 } else { -1 };
            for (v, &w) in perm.iter().enumerate() {
                m.set(w, v, m.get(w, v) + sign);
            }
        }
        m
    }
}

/// A complex floating operator on the vertex space.
#[derive(Clone, Debug)]
pub struct ComplexOperator {
    pub matrix: DMatrix<C64>,
}

impl ComplexOperator {
    /// Orthonormal basis of the eigenvalue-1 eigenspace, as columns.
    pub fn range_basis(&self) -> DMatrix<C64> {
        let eig = self.matrix.clone().symmetric_eigen();
        let cols: Vec<_> = (0..eig.eigenvalues.len())
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .map(|i| eig.eigenvectors.column(i).into_owned())
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(self.matrix.nrows(), 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e8).round() / 1e8 + 0.0).collect()
}

fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `eps q^{d/2} K - I + q^{d/2} Y` on `L_n(q)`.
pub fn comparison_operator(d: usize, n: usize, eps: i8, f: &Field) -> Result<Operator> {
    let ctx = build_lattice(n, f, DEFAULT_SUBSPACE_LIMIT)?;
    let ring = ctx.ring();
    let gens = build_rlke(&ctx)?;
    let half_d = ExactScalar::power(ring, QuarterInt::halves(d as i64));
    let id = Operator::identity_in(ring, ctx.labels());
    let mut op = build_y(&ctx)?.scale(&half_d)?.try_sub(&id)?;
    if eps != 0 {
        let c = half_d.try_mul(&ExactScalar::integer_in(ring, eps as i64))?;
        op = op.try_add(&gens.k.scale(&c)?)?;
    }
    Ok(op)
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockData {
    pub s: String,
    pub rank: usize,
    pub eps: i8,
    pub form_rank: usize,
    pub form_eps: i8,
    pub projector_rank: usize,
    pub lattice_size: u128,
    pub restricted_spectrum: Vec<f64>,
    pub lattice_spectrum: Vec<f64>,
    pub spectral_residual: f64,
}

/// The per-`S` checks: projector identities, dimension and spectrum.
pub fn check_rws(s: &SymMatFq, g: &DualPolarGraph, rep: &UnipotentRep, a1: &DMatrix<f64>, tol: f64) -> Result<(Report, BlockData)> {
    check_rws_with_basis(s, g, rep, a1, tol).map(|(r, d, _)| (r, d))
}

/// As [`check_rws`], also returning an orthonormal basis of the range of `P_S`.
fn check_rws_with_basis(
    s: &SymMatFq,
    g: &DualPolarGraph,
    rep: &UnipotentRep,
    a1: &DMatrix<f64>,
    tol: f64,
) -> Result<(Report, BlockData, DMatrix<C64>)> {
    let f = &g.space.field;
    let d = g.d();
    let mut report = Report::new();
    let p = rep.projector(s, f);
    let pm = &p.matrix;
    report.push(Check::float("idempotent", max_abs(&(pm * pm - pm)), PROJECTOR_TOL));
    report.push(Check::float("hermitian", max_abs(&(pm.adjoint() - pm)), PROJECTOR_TOL));
    let a = a1.map(|x| C64::new(x, 0.0));
    report.push(Check::float("commutes_with_a1", max_abs(&(&a * pm - pm * &a)), PROJECTOR_TOL));
    if f.q() == 2 {
        let m = rep.projector_scaled_q2(s, f);
        let scale = rep.syms.len() as i128;
        let a1i = IntMatrix::from_fn(a1.nrows(), |i, j| a1[(i, j)] as i128);
        report.push(Check::holds("exact_idempotent", m.mul(&m) == m.scale(scale), || "P_S^2 != P_S".into()));
        report.push(Check::holds("exact_commutes_with_a1", a1i.mul(&m) == m.mul(&a1i), || "[A_1, P_S] != 0".into()));
    }

    let basis = p.range_basis();
    let projector_rank = basis.ncols();
    let n = d - s.form_rank;
    let lattice_size = subspace_count(n, f.q());
    report.push(Check::holds("dimension", projector_rank as u128 == lattice_size, || {
        format!("rank P_S = {projector_rank}, |L_{n}({})| = {lattice_size}", f.q())
    }));

    let restricted = basis.adjoint() * &a * &basis;
    let restricted_spectrum = {
        let mut v: Vec<f64> = restricted.symmetric_eigen().eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let lattice_spectrum = sorted_eigenvalues(comparison_operator(d, n, s.form_eps, f)?.to_dense_f64());
    let spectral_residual = spectrum_distance(&restricted_spectrum, &lattice_spectrum);
    report.push(Check::float("spectrum", spectral_residual, tol));
    let data = BlockData {
        s: s.label(),
        rank: s.rank,
        eps: s.eps,
        form_rank: s.form_rank,
        form_eps: s.form_eps,
        projector_rank,
        lattice_size,
        restricted_spectrum: rounded(&restricted_spectrum),
        lattice_spectrum: rounded(&lattice_spectrum),
        spectral_residual: if spectral_residual.is_finite() { (spectral_residual * 1e12).round() / 1e12 } else { -1.0 },
    };
    Ok((report, data, basis))
}

/// Whether the blocks predicted from the matrix rank and type of each `S`
/// (rather than its character form) reproduce the spectrum of `A_1`.
fn matrix_type_prediction(g: &DualPolarGraph, syms: &[SymMatFq], full: &[f64], tol: f64) -> Result<bool> {
    let f = &g.space.field;
    let mut predicted = Vec::new();
    for s in syms {
        predicted.extend(sorted_eigenvalues(comparison_operator(g.d(), g.d() - s.rank, s.eps, f)?.to_dense_f64()));
    }
    predicted.sort_by(f64::total_cmp);
    Ok(spectrum_distance(&predicted, full) <= tol.max(1e-7))
}

/// Runs the full decomposition for `C_d(q)`.
pub fn check_ws_decomposition(g: &DualPolarGraph, tol: f64) -> Result<Report> {
    let f = &g.space.field;
    let d = g.d();
    if g.len() > MAX_WS_VERTICES {
        return Err(Error::LimitExceeded { size: g.len() as u128, limit: MAX_WS_VERTICES as u128 });
    }
    let rep = UnipotentRep::new(g, DEFAULT_SYM_LIMIT)?;
    let mut report = Report::new();
    report.push(match rep.composition_failure(f) {
        None => Check::pass("ws/rho_composition"),
        Some((a, b, v)) => Check::fail(
            "ws/rho_composition",
            "nonzero",
            Some(format!("T1 = {}, T2 = {}, vertex {}", rep.syms[a].label(), rep.syms[b].label(), g.vertices[v].label())),
        ),
    });
    let zero = rep.syms.iter().position(|s| s.rank == 0).expect("zero matrix is enumerated");
    report.push(Check::holds("ws/rho_zero_is_identity", rep.perms[zero].iter().enumerate().all(|(i, &j)| i == j), || {
        "T = 0 moves a vertex".into()
    }));

    let a1 = g.table.matrix(1).to_f64();
    let blocks = rep.syms.par_iter().map(|s| check_rws_with_basis(s, g, &rep, &a1, tol)).collect::<Result<Vec<_>>>()?;

    // Completeness, and pairwise orthogonality through the range bases:
    // P_S P_S' = V_S (V_S^* V_S') V_S'^*, with V_S having orthonormal columns.
    let n = g.len();
    let sum = rep.syms.iter().fold(DMatrix::<C64>::zeros(n, n), |acc, s| acc + rep.projector(s, f).matrix);
    report.push(Check::float("ws/completeness", max_abs(&(sum - DMatrix::<C64>::identity(n, n))), PROJECTOR_TOL));
    let bases: Vec<&DMatrix<C64>> = blocks.iter().map(|(_, _, b)| b).collect();
    let orth = (0..bases.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..bases.len())
                .filter(|&j| bases[i].ncols() > 0 && bases[j].ncols() > 0)
                .map(|j| max_abs(&(bases[i].adjoint() * bases[j])))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    report.push(Check::float("ws/orthogonality", orth, PROJECTOR_TOL));

    let mut restricted_all = Vec::new();
    let mut datas = Vec::new();
    for (s, (r, data, _)) in rep.syms.iter().zip(blocks) {
        report.extend(r.scoped(&format!("ws/S={}", s.label())));
        restricted_all.extend(data.restricted_spectrum.iter().copied());
        datas.push(data);
    }
    restricted_all.sort_by(f64::total_cmp);
    let full = sorted_eigenvalues(a1.clone());
    report.push(Check::float("ws/spectrum_union", spectrum_distance(&restricted_all, &full), tol.max(1e-7)));

    let dims: u128 = rep.syms.iter().map(|s| subspace_count(d - s.form_rank, f.q())).sum();
    let expected = lagrangian_count(d, f.q());
    report.push(Check::holds("ws/dimension_bookkeeping", dims == expected, || format!("{dims} != {expected}")));

    let mut type_counts = std::collections::BTreeMap::new();
    for s in &rep.syms {
        *type_counts.entry(format!("rank={},eps={}", s.rank, s.eps)).or_insert(0usize) += 1;
    }
    let mut form_counts = std::collections::BTreeMap::new();
    for s in &rep.syms {
        *form_counts.entry(format!("rank={},eps={}", s.form_rank, s.form_eps)).or_insert(0usize) += 1;
    }
    report.insert("ws_form_type_counts", form_counts);
    report.insert("ws_matrix_type_spectrum_matches", matrix_type_prediction(g, &rep.syms, &full, tol)?);
    report.insert("ws_type_counts", type_counts);
    report.insert("ws_blocks", datas);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualpolar::{build_dual_polar, DEFAULT_LAGRANGIAN_LIMIT};

    fn field(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    fn m(f: &Field, rows: &[&[i64]]) -> MatFq {
        let rows: Vec<Vec<FieldElem>> = rows.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect();
        MatFq::from_rows(&rows, rows[0].len())
    }

    #[test]
    fn sym_counts() {
        assert_eq!(enumerate_sym_matrices(1, &field(2), DEFAULT_SYM_LIMIT).unwrap().len(), 2);
        assert_eq!(enumerate_sym_matrices(2, &field(2), DEFAULT_SYM_LIMIT).unwrap().len(), 8);
        assert_eq!(enumerate_sym_matrices(2, &field(3), DEFAULT_SYM_LIMIT).unwrap().len(), 27);
        assert!(matches!(enumerate_sym_matrices(4, &field(5), DEFAULT_SYM_LIMIT), Err(Error::LimitExceeded { .. })));
        let all = enumerate_sym_matrices(2, &field(3), DEFAULT_SYM_LIMIT).unwrap();
        assert!(all.iter().all(|s| s.matrix.is_symmetric()));
    }

    #[test]
    fn eps_examples() {
        let f3 = field(3);
        assert_eq!(type_eps(&m(&f3, &[&[0, 0], &[0, 0]]), &f3), 1);
        assert_eq!(type_eps(&m(&f3, &[&[1]]), &f3), 0);
        assert_eq!(type_eps(&m(&f3, &[&[1, 0], &[0, 1]]), &f3), -1);
        // det = -1, so (-1) * (-1) = 1 is a square.
        assert_eq!(type_eps(&m(&f3, &[&[1, 0], &[0, 2]]), &f3), 1);
        assert_eq!(type_eps(&m(&f3, &[&[0, 1], &[1, 0]]), &f3), 1);
        let f2 = field(2);
        assert_eq!(type_eps(&m(&f2, &[&[0, 1], &[1, 0]]), &f2), 1);
    }

    #[test]
    fn eps_invariant_under_congruence() {
        let f = field(5);
        let all = enumerate_sym_matrices(2, &f, DEFAULT_SYM_LIMIT).unwrap();
        let g = m(&f, &[&[1, 2], &[3, 4]]);
        for s in &all {
            let t = g.transpose().mul(&s.matrix, &f).mul(&g, &f);
            assert_eq!(type_eps(&t, &f), s.eps, "{}", s.label());
        }
    }

    #[test]
    fn congruence_block_is_nondegenerate() {
        let f = field(3);
        for s in enumerate_sym_matrices(2, &f, DEFAULT_SYM_LIMIT).unwrap() {
            let q = congruence_block(&s.matrix, &f);
            assert_eq!(q.rows(), s.rank);
            assert_eq!(q.rank(&f), s.rank);
        }
    }

    #[test]
    fn unipotent_d1_q2() {
        let f = field(2);
        let g = build_dual_polar(1, &f, DEFAULT_LAGRANGIAN_LIMIT).unwrap();
        let t = m(&f, &[&[1]]);
        let img: Vec<String> = g.vertices.iter().map(|v| unipotent_action(&t, v, &g.space).unwrap().label()).collect();
        let labels: Vec<String> = g.vertices.iter().map(IsotropicVertex::label).collect();
        // span{e_2} is fixed; span{e_1} and span{e_1 + e_2} are swapped.
        let pos = |l: &str| labels.iter().position(|x| x == l).unwrap();
        assert_eq!(img[pos("[0,1]")], "[0,1]");
        assert_eq!(img[pos("[1,0]")], "[1,1]");
        assert_eq!(img[pos("[1,1]")], "[1,0]");
        let zero = m(&f, &[&[0]]);
        assert!(g.vertices.iter().all(|v| unipotent_action(&zero, v, &g.space).unwrap() == *v));
        assert!(matches!(unipotent_action(&m(&f, &[&[0, 1], &[0, 0]]), &g.vertices[0], &g.space), Err(Error::NotSymplectic)));
    }

    #[test]
    fn composition_is_exhaustive() {
        for q in [2, 3] {
            let f = field(q);
            let g = build_dual_polar(2, &f, DEFAULT_LAGRANGIAN_LIMIT).unwrap();
            let rep = UnipotentRep::new(&g, DEFAULT_SYM_LIMIT).unwrap();
            assert_eq!(rep.composition_failure(&f), None);
        }
    }

    #[test]
    fn d1_q2_hand_spectra() {
        let f = field(2);
        let g = build_dual_polar(1, &f, DEFAULT_LAGRANGIAN_LIMIT).unwrap();
        let rep = UnipotentRep::new(&g, DEFAULT_SYM_LIMIT).unwrap();
        let a1 = g.table.matrix(1).to_f64();
        let (r0, d0) = check_rws(&rep.syms[0], &g, &rep, &a1, 1e-8).unwrap();
        let (r1, d1) = check_rws(&rep.syms[1], &g, &rep, &a1, 1e-8).unwrap();
        assert!(r0.all_passed() && r1.all_passed());
        assert_eq!((d0.projector_rank, d1.projector_rank), (2, 1));
        assert_eq!(d0.lattice_spectrum, vec![-1.0, 2.0]);
        assert_eq!(d1.lattice_spectrum, vec![-1.0]);
        let op = comparison_operator(1, 1, 1, &f).unwrap().to_dense_f64();
        let s2 = 2f64.sqrt();
        assert!((op[(0, 0)] - 1.0).abs() < 1e-12 && op[(1, 1)].abs() < 1e-12);
        assert!((op[(0, 1)] - s2).abs() < 1e-12 && (op[(1, 0)] - s2).abs() < 1e-12);
    }

    #[test]
    fn full_decomposition_small() {
        for (d, q) in [(1, 2), (1, 3), (2, 2), (2, 3), (2, 4), (3, 2)] {
            let g = build_dual_polar(d, &field(q), DEFAULT_LAGRANGIAN_LIMIT).unwrap();
            let report = check_ws_decomposition(&g, 1e-8).unwrap();
            assert!(report.all_passed(), "d={d} q={q}: {:?}", report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn form_invariants_match_matrix_type_in_odd_characteristic() {
        for (d, q) in [(1, 3), (2, 3), (2, 5), (3, 3)] {
            let f = field(q);
            for s in enumerate_sym_matrices(d, &f, DEFAULT_SYM_LIMIT).unwrap() {
                assert_eq!((s.form_rank, s.form_eps), (s.rank, s.eps), "q={q} {}", s.label());
            }
        }
    }

    #[test]
    fn char_2_form_labels() {
        let f = field(2);
        let all = enumerate_sym_matrices(2, &f, DEFAULT_SYM_LIMIT).unwrap();
        let get = |l: &str| all.iter().find(|s| s.label() == l).unwrap();
        // x^2 + xy + y^2 is anisotropic.
        assert_eq!((get("[1,1;1,1]").form_rank, get("[1,1;1,1]").form_eps), (2, -1));
        // x^2 + y^2 = (x + y)^2.
        assert_eq!((get("[1,0;0,1]").form_rank, get("[1,0;0,1]").form_eps), (1, 0));
        assert_eq!((get("[0,1;1,0]").form_rank, get("[0,1;1,0]").form_eps), (2, 1));
        assert_eq!((get("[1,0;0,1]").rank, get("[1,0;0,1]").eps), (2, 1));
    }

    #[test]
    fn matrix_type_reading_fails_in_char_2() {
        let g = build_dual_polar(2, &field(2), DEFAULT_LAGRANGIAN_LIMIT).unwrap();
        let report = check_ws_decomposition(&g, 1e-8).unwrap();
        assert_eq!(report.data["ws_matrix_type_spectrum_matches"], serde_json::json!(false));
        let g = build_dual_polar(2, &field(3), DEFAULT_LAGRANGIAN_LIMIT).unwrap();
        let report = check_ws_decomposition(&g, 1e-8).unwrap();
        assert_eq!(report.data["ws_matrix_type_spectrum_matches"], serde_json::json!(true));
    }

    #[test]
    fn trace_pairing_is_degenerate_in_char_2() {
        // tr(S T) ignores off-diagonal entries over F_2, so S = [0,1;1,0]
        // pairs trivially with everything.
        let f = field(2);
        let s = m(&f, &[&[0, 1], &[1, 0]]);
        for t in enumerate_sym_matrices(2, &f, DEFAULT_SYM_LIMIT).unwrap() {
            let tr = (0..2).fold(FieldElem::ZERO, |acc, i| {
                (0..2).fold(acc, |acc, j| f.add(acc, f.mul(s.get(i, j), t.matrix.get(j, i))))
            });
            assert!(tr.is_zero());
        }
    }
}
