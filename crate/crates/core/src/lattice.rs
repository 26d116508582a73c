//! The subspace lattice `L_N(q)`, its incidence-algebra generators, and the
//! weighted adjacency operator `Y`.

use std::collections::HashMap;

use crate::error::Result;
use crate::field::Field;
use crate::fq::{enumerate_subspaces, intersect_dim, Subspace};
use crate::operator::Operator;
use crate::report::{Check, Report};
use crate::scalar::{ExactScalar, QuarterInt, ScalarRing};

/// All subspaces of `F_q^n` in the canonical enumeration order.
#[derive(Clone, Debug)]
pub struct LatticeContext {
    n: usize,
    field: Field,
    ring: ScalarRing,
    vertices: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
}

impl LatticeContext {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q() as u32
    }

    pub fn ring(&self) -> ScalarRing {
        self.ring
    }

    pub fn vertices(&self) -> &[Subspace] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn labels(&self) -> Vec<String> {
        self.vertices.iter().map(Subspace::label).collect()
    }

    fn pow(&self, k: QuarterInt) -> ExactScalar {
        ExactScalar::power(self.ring, k)
    }

    /// Pairs `(upper, lower)` of vertex indices with `upper` covering `lower`,
    /// found from the definition: containment with a dimension gap of one.
    pub fn covering_pairs(&self) -> Result<Vec<(usize, usize)>> {
        let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); self.n + 1];
        for (i, v) in self.vertices.iter().enumerate() {
            by_dim[v.dim()].push(i);
        }
        let mut out = Vec::new();
        for d in 0..self.n {
            for &lo in &by_dim[d] {
                for &hi in &by_dim[d + 1] {
                    if intersect_dim(&self.vertices[hi], &self.vertices[lo], &self.field)? == d {
                        out.push((hi, lo));
                    }
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

pub fn build_lattice(n: usize, field: &Field, limit: u128) -> Result<LatticeContext> {
    let vertices = enumerate_subspaces(n, field, limit)?;
    let index = vertices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    Ok(LatticeContext { n, field: field.clone(), ring: ScalarRing::new(field.q() as u32)?, vertices, index })
}

/// Raising, lowering, grading projectors and `K` on `L_N(q)`.
#[derive(Clone, Debug)]
pub struct LatticeGenerators {
    /// `R[U, V] = 1` iff `U` covers `V`.
    pub raise: Operator,
    /// `L = R^T`.
    pub lower: Operator,
    /// `K = sum_i q^{N/2 - i} E_i*`.
    pub k: Operator,
    pub k_inv: Operator,
    /// `E_i*`, the projector onto `i`-dimensional subspaces.
    pub projectors: Vec<Operator>,
}

pub fn build_rlke(ctx: &LatticeContext) -> Result<LatticeGenerators> {
    let labels = ctx.labels();
    let ring = ctx.ring;
    let one = ExactScalar::integer_in(ring, 1);
    let pairs = ctx.covering_pairs()?;
    let raise = Operator::from_entries(
        ring,
        labels.clone(),
        labels.clone(),
        pairs.iter().map(|&(hi, lo)| (hi, lo, one.clone())),
    )?;
    let lower = raise.transpose();
    let n = ctx.n as i64;
    let dims: Vec<i64> = ctx.vertices.iter().map(|v| v.dim() as i64).collect();
    let k = Operator::diagonal_in(
        ring,
        labels.clone(),
        dims.iter().map(|&i| ctx.pow(QuarterInt::halves(n - 2 * i))).collect(),
    )?;
    let k_inv = Operator::diagonal_in(
        ring,
        labels.clone(),
        dims.iter().map(|&i| ctx.pow(QuarterInt::halves(2 * i - n))).collect(),
    )?;
    let projectors = (0..=n)
        .map(|d| {
            Operator::from_entries(
                ring,
                labels.clone(),
                labels.clone(),
                dims.iter().enumerate().filter(|(_, &i)| i == d).map(|(v, _)| (v, v, one.clone())),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LatticeGenerators { raise, lower, k, k_inv, projectors })
}

/// `Y = q^{(1-N)/4} (q^{1/4} L + q^{-1/4} R) K^{1/2}`, built entrywise.
///
/// Out of an `i`-dimensional vertex the lowering entries are `q^{(1-i)/2}`
/// and the raising entries are `q^{-i/2}`, so only half-integer powers occur.
pub fn build_y(ctx: &LatticeContext) -> Result<Operator> {
    let labels = ctx.labels();
    let mut entries = Vec::new();
    for (hi, lo) in ctx.covering_pairs()? {
        let i_lo = ctx.vertices[lo].dim() as i64;
        let i_hi = i_lo + 1;
        // Raising part, column `lo`.
        entries.push((hi, lo, ctx.pow(QuarterInt::halves(-i_lo))));
        // Lowering part, column `hi`.
        entries.push((lo, hi, ctx.pow(QuarterInt::halves(1 - i_hi))));
    }
    Operator::from_entries(ctx.ring, labels.clone(), labels, entries)
}

/// The three images `(e, f, k)` of the quantum group generators and `k^{-1}`.
struct UqImage<'a> {
    e: Operator,
    f: Operator,
    k: &'a Operator,
    k_inv: &'a Operator,
}

fn check_uq_image(ctx: &LatticeContext, img: &UqImage<'_>, prefix: &str) -> Result<Report> {
    let mut report = Report::new();
    let ring = ctx.ring;
    let id = Operator::identity_in(ring, ctx.labels());
    let q1 = ctx.pow(QuarterInt::from_int(1));
    let qm1 = ctx.pow(QuarterInt::from_int(-1));

    report.push(Check::exact(
        format!("{prefix}/k_kinv"),
        &img.k.try_mul(img.k_inv)?.try_sub(&id)?,
    ));
    report.push(Check::exact(
        format!("{prefix}/kinv_k"),
        &img.k_inv.try_mul(img.k)?.try_sub(&id)?,
    ));
    let kek = img.k.try_mul(&img.e)?.try_mul(img.k_inv)?;
    report.push(Check::exact(format!("{prefix}/k_e_kinv"), &kek.try_sub(&img.e.scale(&q1)?)?));
    let kfk = img.k.try_mul(&img.f)?.try_mul(img.k_inv)?;
    report.push(Check::exact(format!("{prefix}/k_f_kinv"), &kfk.try_sub(&img.f.scale(&qm1)?)?));

    // [e, f] = (k - k^{-1}) / (q^{1/2} - q^{-1/2}).
    let comm = img.e.try_mul(&img.f)?.try_sub(&img.f.try_mul(&img.e)?)?;
    let denom = ctx.pow(QuarterInt::halves(1)).try_sub(&ctx.pow(QuarterInt::halves(-1)))?;
    let rhs = img.k.try_sub(img.k_inv)?.scale(&denom.inv()?)?;
    report.push(Check::exact(format!("{prefix}/commutator"), &comm.try_sub(&rhs)?));
    Ok(report)
}

/// Checks the quantum group relations (deformation parameter `sqrt q`)
/// under both homomorphisms
/// `e -> q^{(1-N)/4} L, f -> q^{(1-N)/4} R, k -> K` and its twist by the
/// involution swapping `e, f` and inverting `k`, along with the structural
/// identities of the generators.
pub fn check_uq_relations(ctx: &LatticeContext) -> Result<Report> {
    let gens = build_rlke(ctx)?;
    let c = ctx.pow(QuarterInt::quarters(1 - ctx.n as i64));
    let mut report = Report::new();

    let first = UqImage { e: gens.lower.scale(&c)?, f: gens.raise.scale(&c)?, k: &gens.k, k_inv: &gens.k_inv };
    report.extend(check_uq_image(ctx, &first, "repsl")?);
    let twisted = UqImage { e: gens.raise.scale(&c)?, f: gens.lower.scale(&c)?, k: &gens.k_inv, k_inv: &gens.k };
    report.extend(check_uq_image(ctx, &twisted, "repsl_twisted")?);

    report.extend(check_generator_structure(ctx, &gens)?);
    Ok(report)
}

/// `L = R^T`, the projectors form a resolution of the identity, and `R`
/// raises the grading by one.
pub fn check_generator_structure(ctx: &LatticeContext, gens: &LatticeGenerators) -> Result<Report> {
    let mut report = Report::new();
    let id = Operator::identity_in(ctx.ring, ctx.labels());
    report.push(Check::holds("structure/l_is_r_transpose", gens.lower.same_entries(&gens.raise.transpose()), || {
        "L differs from R^T".into()
    }));
    let mut sum = Operator::zeros_in(ctx.ring, ctx.labels(), ctx.labels());
    let mut orth_ok = true;
    let mut grading_ok = true;
    for (i, ei) in gens.projectors.iter().enumerate() {
        sum = sum.try_add(ei)?;
        for (j, ej) in gens.projectors.iter().enumerate() {
            let p = ei.try_mul(ej)?;
            let expected = if i == j { ei.clone() } else { Operator::zeros_in(ctx.ring, ctx.labels(), ctx.labels()) };
            orth_ok &= p.same_entries(&expected);
        }
        if i < ctx.n {
            let lhs = gens.raise.try_mul(ei)?;
            let rhs = gens.projectors[i + 1].try_mul(&gens.raise)?;
            grading_ok &= lhs.same_entries(&rhs);
        }
    }
    report.push(Check::exact("structure/projectors_sum_to_identity", &sum.try_sub(&id)?));
    report.push(Check::holds("structure/projectors_orthogonal", orth_ok, || "E_i E_j != delta_ij E_i".into()));
    report.push(Check::holds("structure/raise_grading", grading_ok, || "R E_i != E_{i+1} R".into()));
    let k_expected = gens
        .projectors
        .iter()
        .enumerate()
        .try_fold(Operator::zeros_in(ctx.ring, ctx.labels(), ctx.labels()), |acc, (i, e)| {
            acc.try_add(&e.scale(&ctx.pow(QuarterInt::halves(ctx.n as i64 - 2 * i as i64)))?)
        })?;
    report.push(Check::exact("structure/k_from_projectors", &gens.k.try_sub(&k_expected)?));
    Ok(report)
}
