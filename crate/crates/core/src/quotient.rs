//! The isometry `zeta` from the cube module onto profile classes of the
//! subspace lattice, and the identities relating `Y` to the weighted cube.

use crate::cube::{bits, build_aq, cube_labels, index_of_bits, reversal_operator, CubeContext};
use crate::error::Result;
use crate::fq::{cover_count, profile_preimage_exponent};
use crate::lattice::{build_rlke, build_y, LatticeContext, LatticeGenerators};
use crate::operator::Operator;
use crate::report::{Check, Report};
use crate::scalar::{ExactScalar, QuarterInt};

/// `zeta(|x>) = q^{-m/2} sum_{tau_diag(V) = x} |V>`, where `q^m` is the size
/// of the profile class. Rows are subspaces, columns bit strings.
#[derive(Clone, Debug)]
pub struct ZetaMap {
    pub matrix: Operator,
}

pub fn build_zeta(ctx: &LatticeContext) -> Result<ZetaMap> {
    let ring = ctx.ring();
    let entries = ctx.vertices().iter().enumerate().map(|(row, v)| {
        let x = v.profile();
        let m = profile_preimage_exponent(&x) as i64;
        (row, index_of_bits(&x), ExactScalar::power(ring, QuarterInt::halves(-m)))
    });
    let matrix = Operator::from_entries(ring, ctx.labels(), cube_labels(ctx.n()), entries)?;
    Ok(ZetaMap { matrix })
}

/// Exponent of `q` in the coefficient of `zeta(x +- e_k)` in the action of
/// `R` or `L` on `zeta(x)` (`k` is 1-based).
pub fn action_exponent(x: &[bool], k: usize) -> QuarterInt {
    let before: i64 = x[..k - 1].iter().map(|&b| b as i64).sum();
    let after: i64 = x[k..].iter().map(|&b| b as i64).sum();
    QuarterInt::halves(k as i64 - 1 - before + after)
}

/// The cube operators `M_R`, `M_L` with `R zeta = zeta M_R`, `L zeta = zeta M_L`
/// predicted by the action formulas.
pub fn predicted_actions(ctx: &LatticeContext) -> Result<(Operator, Operator)> {
    let ring = ctx.ring();
    let n = ctx.n();
    let mut raise = Vec::new();
    let mut lower = Vec::new();
    for v in 0..1usize << n {
        let x = bits(v, n);
        for k in 1..=n {
            let w = v ^ (1 << (n - k));
            let c = ExactScalar::power(ring, action_exponent(&x, k));
            if x[k - 1] {
                lower.push((w, v, c));
            } else {
                raise.push((w, v, c));
            }
        }
    }
    let labels = cube_labels(n);
    Ok((
        Operator::from_entries(ring, labels.clone(), labels.clone(), raise)?,
        Operator::from_entries(ring, labels.clone(), labels, lower)?,
    ))
}

fn grading_projector(ctx: &LatticeContext, i: usize) -> Result<Operator> {
    let ring = ctx.ring();
    let n = ctx.n();
    let one = ExactScalar::integer_in(ring, 1);
    let labels = cube_labels(n);
    Operator::from_entries(
        ring,
        labels.clone(),
        labels,
        (0..1usize << n).filter(|v| v.count_ones() as usize == i).map(|v| (v, v, one.clone())),
    )
}

/// The action formulas for `R`, `L`, `E_i*` on `zeta`, and the `R`
/// coefficient rebuilt from the counting argument.
pub fn check_action_formulas(ctx: &LatticeContext) -> Result<Report> {
    let gens = build_rlke(ctx)?;
    let zeta = build_zeta(ctx)?.matrix;
    let (m_r, m_l) = predicted_actions(ctx)?;
    let mut report = Report::new();
    report.push(Check::exact("action/raise", &gens.raise.try_mul(&zeta)?.try_sub(&zeta.try_mul(&m_r)?)?));
    report.push(Check::exact("action/lower", &gens.lower.try_mul(&zeta)?.try_sub(&zeta.try_mul(&m_l)?)?));
    for (i, e) in gens.projectors.iter().enumerate() {
        let d = grading_projector(ctx, i)?;
        report.push(Check::exact(format!("action/grading_{i}"), &e.try_mul(&zeta)?.try_sub(&zeta.try_mul(&d)?)?));
    }

    // Each subspace of profile x + e_k covers cover_count(x, k) subspaces of
    // profile x, which yields the coefficient
    // cover_count * sqrt(|class(x + e_k)| / |class(x)|).
    let ring = ctx.ring();
    let n = ctx.n();
    let q = ctx.q() as u64;
    let mut witness = None;
    for v in 0..1usize << n {
        let x = bits(v, n);
        for k in 1..=n {
            if x[k - 1] {
                continue;
            }
            let mut y = x.clone();
            y[k - 1] = true;
            let count = cover_count(&y, k - 1, q)?;
            let count = ExactScalar::rational_in(ring, num_rational::BigRational::from_integer(count.into()));
            let ratio = QuarterInt::halves(profile_preimage_exponent(&y) as i64 - profile_preimage_exponent(&x) as i64);
            let counted = count.try_mul(&ExactScalar::power(ring, ratio))?;
            let formula = ExactScalar::power(ring, action_exponent(&x, k));
            if counted != formula && witness.is_none() {
                witness = Some(format!("x = {}, k = {k}: counted {counted}, formula {formula}", m_r.col_labels()[v]));
            }
        }
    }
    report.push(match witness {
        None => Check::pass("action/raise_counting"),
        Some(w) => Check::fail("action/raise_counting", "nonzero", Some(w)),
    });
    Ok(report)
}

/// `(I - zeta zeta^T) X zeta = 0` for `X` in `R`, `L`, `E_i*`.
pub fn closure_report(zeta: &Operator, gens: &LatticeGenerators) -> Result<Report> {
    let proj = zeta.try_mul(&zeta.transpose())?;
    let id = Operator::identity_in(zeta.ring(), zeta.row_labels().to_vec());
    let complement = id.try_sub(&proj)?;
    let mut report = Report::new();
    report.push(Check::exact("closure/raise", &complement.try_mul(&gens.raise.try_mul(zeta)?)?));
    report.push(Check::exact("closure/lower", &complement.try_mul(&gens.lower.try_mul(zeta)?)?));
    let mut grading = None;
    for (i, e) in gens.projectors.iter().enumerate() {
        if let Some(entry) = complement.try_mul(&e.try_mul(zeta)?)?.first_nonzero() {
            grading.get_or_insert((i, entry));
        }
    }
    report.push(match grading {
        None => Check::pass("closure/grading"),
        Some((i, (r, c, v))) => Check::fail(
            "closure/grading",
            v.to_string(),
            Some(format!("E_{i}*, entry ({}, {})", zeta.row_labels()[r], zeta.col_labels()[c])),
        ),
    });
    Ok(report)
}

pub fn check_submodule_closure(ctx: &LatticeContext) -> Result<Report> {
    let gens = build_rlke(ctx)?;
    let zeta = build_zeta(ctx)?.matrix;
    let mut report = closure_report(&zeta, &gens)?;
    let id = Operator::identity_in(ctx.ring(), zeta.col_labels().to_vec());
    report.push(Check::exact("isometry/zeta_t_zeta", &zeta.transpose().try_mul(&zeta)?.try_sub(&id)?));
    let y = build_y(ctx)?;
    let proj = zeta.try_mul(&zeta.transpose())?;
    report.push(Check::exact("isometry/projector_commutes_with_y", &proj.try_mul(&y)?.try_sub(&y.try_mul(&proj)?)?));
    Ok(report)
}

/// `Y zeta - zeta pi^{-1} A_{1/sqrt q} pi`, or with `pi` replaced by the
/// identity when `reverse` is false.
pub fn quotient_residual(ctx: &LatticeContext, reverse: bool) -> Result<Operator> {
    let zeta = build_zeta(ctx)?.matrix;
    let y = build_y(ctx)?;
    let cube = CubeContext::new(ctx.n(), ctx.q(), QuarterInt::halves(-1))?;
    let mut a = build_aq(&cube)?;
    if reverse {
        let pi = reversal_operator(ctx.n(), ctx.ring())?;
        // pi is an involution, so pi^{-1} = pi.
        a = pi.try_mul(&a)?.try_mul(&pi)?;
    }
    y.try_mul(&zeta)?.try_sub(&zeta.try_mul(&a)?)
}

pub fn check_quotient_identity(ctx: &LatticeContext) -> Result<Report> {
    let mut report = Report::new();
    report.push(Check::exact("quotient/y_zeta", &quotient_residual(ctx, true)?));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::fq::DEFAULT_SUBSPACE_LIMIT;
    use crate::lattice::build_lattice;

    fn ctx(n: usize, q: u64) -> LatticeContext {
        build_lattice(n, &Field::new(q).unwrap(), DEFAULT_SUBSPACE_LIMIT).unwrap()
    }

    #[test]
    fn zeta_n1_is_identity() {
        let c = ctx(1, 2);
        let z = build_zeta(&c).unwrap().matrix;
        assert_eq!(z.nnz(), 2);
        assert!(z.get(0, 0).is_one() && z.get(1, 1).is_one());
    }

    #[test]
    fn zeta_n2_column_01() {
        let c = ctx(2, 2);
        let z = build_zeta(&c).unwrap().matrix;
        let col = 1; // profile 01
        let entries: Vec<ExactScalar> = (0..z.nrows()).map(|r| z.get(r, col)).filter(|v| !v.is_zero()).collect();
        assert_eq!(entries.len(), 2);
        let expected = ExactScalar::power(c.ring(), QuarterInt::halves(-1));
        assert!(entries.iter().all(|v| *v == expected));
    }

    #[test]
    fn action_exponent_examples() {
        assert_eq!(action_exponent(&[false], 1), QuarterInt::ZERO);
        assert_eq!(action_exponent(&[false, false], 1), QuarterInt::ZERO);
        assert_eq!(action_exponent(&[false, false], 2), QuarterInt::halves(1));
    }

    #[test]
    fn checks_pass_small() {
        for (n, q) in [(1, 2), (2, 2), (3, 2), (2, 3)] {
            let c = ctx(n, q);
            for report in [
                check_action_formulas(&c).unwrap(),
                check_submodule_closure(&c).unwrap(),
                check_quotient_identity(&c).unwrap(),
            ] {
                assert!(report.all_passed(), "n={n} q={q}: {:?}", report.failures().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn identity_permutation_breaks_quotient() {
        assert!(!quotient_residual(&ctx(2, 2), false).unwrap().is_zero());
    }

    #[test]
    fn corrupted_zeta_breaks_closure() {
        let c = ctx(2, 2);
        let gens = build_rlke(&c).unwrap();
        let zeta = build_zeta(&c).unwrap().matrix;
        // Zero one of the two entries in the column of profile 01.
        let (r, col, _) = zeta.nonzeros().find(|(_, j, _)| *j == 1).map(|(i, j, v)| (i, j, v.clone())).unwrap();
        let entries = zeta.nonzeros().filter(|&(i, j, _)| (i, j) != (r, col)).map(|(i, j, v)| (i, j, v.clone()));
        let bad = Operator::from_entries(c.ring(), zeta.row_labels().to_vec(), zeta.col_labels().to_vec(), entries.collect::<Vec<_>>()).unwrap();
        assert!(!closure_report(&bad, &gens).unwrap().all_passed());
    }
}
