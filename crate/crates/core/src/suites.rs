//! Named verification suites and the report format they produce.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::{check_aq_forms, check_hamming_recurrence, check_kp_identity, hamming_distance_matrices, CubeContext, MAX_HAMMING_N};
use crate::dualpolar::{
    build_dual_polar, check_distance_regularity, check_dqk_identity, check_ttr2, lagrangian_count, IntersectionArray,
};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fq::subspace_count;
use crate::lattice::{build_lattice, build_rlke, check_generator_structure, check_uq_relations};
use crate::qcomb::{gaussian_binomial, qbracket_gauss};
use crate::quotient::{check_action_formulas, check_quotient_identity, check_submodule_closure};
use crate::report::{Check, Report, Status};
use crate::scalar::QuarterInt;
use crate::scheme::check_scheme;
use crate::ws::{check_ws_decomposition, MAX_WS_VERTICES};

pub const REPORT_SCHEMA: &str = "qlab-report/1";
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    LatticeUq,
    CubeTensor,
    Hamming,
    Quotient,
    DualpolarDrg,
    DualpolarDqk,
    Scheme,
    WsDecomp,
    All,
}

impl Suite {
    pub const COMPONENTS: [Suite; 8] = [
        Suite::LatticeUq,
        Suite::CubeTensor,
        Suite::Hamming,
        Suite::Quotient,
        Suite::DualpolarDrg,
        Suite::DualpolarDqk,
        Suite::Scheme,
        Suite::WsDecomp,
    ];

    pub const NAMES: [&'static str; 9] =
        ["lattice-uq", "cube-tensor", "hamming", "quotient", "dualpolar-drg", "dualpolar-dqk", "scheme", "ws-decomp", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LatticeUq => "lattice-uq",
            Suite::CubeTensor => "cube-tensor",
            Suite::Hamming => "hamming",
            Suite::Quotient => "quotient",
            Suite::DualpolarDrg => "dualpolar-drg",
            Suite::DualpolarDqk => "dualpolar-dqk",
            Suite::Scheme => "scheme",
            Suite::WsDecomp => "ws-decomp",
            Suite::All => "all",
        }
    }

    /// Largest object (in vertices) a suite builds unless `--limit` says otherwise.
    pub fn default_window(self) -> u128 {
        match self {
            Suite::LatticeUq | Suite::Quotient => 2_000,
            Suite::CubeTensor | Suite::Hamming => 1 << MAX_HAMMING_N,
            Suite::DualpolarDrg | Suite::DualpolarDqk => 3_000,
            Suite::Scheme => 160,
            Suite::WsDecomp => MAX_WS_VERTICES as u128,
            Suite::All => 0,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::COMPONENTS
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}; expected one of {}", Suite::NAMES.join(", "))))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Dimension parameter: `N` for lattices and cubes, `d` for dual polar graphs.
    pub n: Option<usize>,
    pub q: Option<u64>,
    pub tol: f64,
    pub limit: Option<u128>,
    #[serde(skip)]
    pub timings: bool,
}

impl Default for Params {
    fn default() -> Self {
        Params { n: None, q: None, tol: DEFAULT_TOL, limit: None, timings: false }
    }
}

impl Params {
    fn sizes(&self, default: impl IntoIterator<Item = usize>) -> Vec<usize> {
        self.n.map_or_else(|| default.into_iter().collect(), |n| vec![n])
    }

    fn qs(&self, default: &[u64]) -> Vec<u64> {
        self.q.map_or_else(|| default.to_vec(), |q| vec![q])
    }

    fn window(&self, suite: Suite) -> u128 {
        self.limit.unwrap_or(suite.default_window())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub suite: String,
    pub parameters: Params,
    pub summary: Summary,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, serde_json::Value>,
}

impl SuiteReport {
    fn new(suite: Suite, params: &Params, report: Report) -> Self {
        let mut summary = Summary::default();
        for c in &report.checks {
            match c.status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Skip => summary.skipped += 1,
            }
        }
        SuiteReport {
            schema: REPORT_SCHEMA.into(),
            suite: suite.name().into(),
            parameters: params.clone(),
            summary,
            checks: report.checks,
            data: report.data,
        }
    }

    /// No non-skipped check failed.
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let p = &self.parameters;
        let opt = |v: Option<String>| v.unwrap_or_else(|| "default".into());
        let mut out = format!(
            "{} suite={} n={} q={} tol={:e} limit={}\n",
            self.schema,
            self.suite,
            opt(p.n.map(|v| v.to_string())),
            opt(p.q.map(|v| v.to_string())),
            p.tol,
            opt(p.limit.map(|v| v.to_string())),
        );
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = write!(out, "{tag}  {}  {}", c.name, c.residual);
            if let Some(w) = &c.witness {
                let _ = write!(out, "  ({w})");
            }
            if let Some(ms) = c.wall_ms {
                let _ = write!(out, "  [{ms} ms]");
            }
            out.push('\n');
        }
        let s = &self.summary;
        let _ = writeln!(out, "summary: {} passed, {} failed, {} skipped", s.passed, s.failed, s.skipped);
        out
    }
}

type CaseFn<'a> = Box<dyn Fn() -> Result<Report> + Send + Sync + 'a>;

/// A parameter point of a suite: either runnable or skipped with a reason.
struct Case<'a> {
    label: String,
    run: std::result::Result<CaseFn<'a>, String>,
}

impl<'a> Case<'a> {
    fn new(label: impl Into<String>, f: impl Fn() -> Result<Report> + Send + Sync + 'a) -> Self {
        Case { label: label.into(), run: Ok(Box::new(f)) }
    }

    fn skip(label: impl Into<String>, reason: impl Into<String>) -> Self {
        Case { label: label.into(), run: Err(reason.into()) }
    }

    fn windowed(label: String, size: u128, window: u128, f: impl Fn() -> Result<Report> + Send + Sync + 'a) -> Self {
        if size > window {
            Case::skip(label, format!("{size} vertices exceeds the window of {window}; raise --limit to run"))
        } else {
            Case::new(label, f)
        }
    }
}

fn field_or_skip(q: u64) -> std::result::Result<Field, String> {
    Field::new(q).map_err(|e| format!("q = {q} outside the supported fields: {e}"))
}

/// A finished case with its wall time, or the reason it was skipped.
type CaseOutcome = std::result::Result<(Result<Report>, u64), String>;

/// Runs every case in parallel and assembles the checks in case order.
fn run_cases(cases: Vec<Case<'_>>, timings: bool) -> Report {
    let results: Vec<(String, CaseOutcome)> = cases
        .into_par_iter()
        .map(|c| {
            let out = c.run.map(|f| {
                let start = Instant::now();
                let r = f();
                (r, start.elapsed().as_millis() as u64)
            });
            (c.label, out)
        })
        .collect();
    let mut report = Report::new();
    for (label, out) in results {
        match out {
            Err(reason) => report.push(Check::skip(label, reason)),
            Ok((Err(Error::LimitExceeded { size, limit }), _)) => {
                report.push(Check::skip(label, format!("enumeration size {size} exceeds limit {limit}")))
            }
            Ok((Err(e), _)) => report.push(Check::fail(format!("{label}/error"), "error", Some(e.to_string()))),
            Ok((Ok(r), ms)) => {
                let mut r = r.scoped(&label);
                if timings {
                    for c in &mut r.checks {
                        c.wall_ms = Some(ms);
                    }
                }
                report.extend(r);
            }
        }
    }
    report
}

fn lattice_uq_cases(p: &Params) -> Vec<Case<'static>> {
    let window = p.window(Suite::LatticeUq);
    let mut cases = Vec::new();
    for q in p.qs(&[2, 3, 4]) {
        for n in p.sizes(1..=4) {
            let label = format!("n={n},q={q}");
            let f = match field_or_skip(q) {
                Ok(f) => f,
                Err(r) => {
                    cases.push(Case::skip(label, r));
                    continue;
                }
            };
            cases.push(Case::windowed(label, subspace_count(n, q), window, move || {
                let ctx = build_lattice(n, &f, window)?;
                let mut report = Report::new();
                let expected = (0..=n as u32).map(|k| gaussian_binomial(n as u32, k, q)).sum::<Result<num_bigint::BigUint>>()?;
                report.push(Check::holds("lattice/vertex_count", num_bigint::BigUint::from(ctx.len()) == expected, || {
                    format!("{} vertices, expected {expected}", ctx.len())
                }));
                report.extend(check_uq_relations(&ctx)?);
                report.extend(check_generator_structure(&ctx, &build_rlke(&ctx)?)?);
                Ok(report)
            }));
        }
    }
    cases
}

fn cube_tensor_cases(p: &Params) -> Vec<Case<'static>> {
    let mut cases = Vec::new();
    let ts = [QuarterInt::ZERO, QuarterInt::halves(-1), QuarterInt::from_int(1)];
    for q in p.qs(&[2, 3]) {
        for n in p.sizes(1..=8) {
            for t in ts {
                let label = format!("n={n},q={q},t={t}");
                if n > MAX_HAMMING_N {
                    cases.push(Case::skip(label, format!("n = {n} exceeds {MAX_HAMMING_N}")));
                    continue;
                }
                if q > u32::MAX as u64 {
                    cases.push(Case::skip(label, "q too large"));
                    continue;
                }
                match CubeContext::new(n, q as u32, t) {
                    Ok(ctx) => cases.push(Case::new(label, move || check_aq_forms(&ctx))),
                    Err(e) => cases.push(Case::skip(label, format!("q = {q} unsupported: {e}"))),
                }
            }
        }
    }
    cases
}

fn hamming_cases(p: &Params) -> Vec<Case<'static>> {
    p.sizes(1..=6)
        .into_iter()
        .map(|n| {
            let label = format!("n={n}");
            if n > MAX_HAMMING_N {
                return Case::skip(label, format!("n = {n} exceeds {MAX_HAMMING_N}"));
            }
            Case::new(label, move || {
                let mut report = check_hamming_recurrence(n)?;
                report.extend(check_kp_identity(n)?);
                Ok(report)
            })
        })
        .collect()
}

fn quotient_cases(p: &Params) -> Vec<Case<'static>> {
    let window = p.window(Suite::Quotient);
    let points: Vec<(usize, u64)> = match (p.n, p.q) {
        (None, None) => vec![(1, 2), (2, 2), (3, 2), (2, 3), (3, 3), (4, 2)],
        (Some(n), Some(q)) => vec![(n, q)],
        (Some(n), None) => vec![(n, 2), (n, 3)],
        (None, Some(q)) => (1..=4).map(|n| (n, q)).collect(),
    };
    points
        .into_iter()
        .map(|(n, q)| {
            let label = format!("n={n},q={q}");
            match field_or_skip(q) {
                Err(r) => Case::skip(label, r),
                Ok(f) => Case::windowed(label, subspace_count(n, q), window, move || {
                    let ctx = build_lattice(n, &f, window)?;
                    let mut report = check_action_formulas(&ctx)?;
                    report.extend(check_submodule_closure(&ctx)?);
                    report.extend(check_quotient_identity(&ctx)?);
                    Ok(report)
                }),
            }
        })
        .collect()
}

fn dual_polar_points(p: &Params, default: &[(usize, u64)]) -> Vec<(usize, u64)> {
    match (p.n, p.q) {
        (None, None) => default.to_vec(),
        (Some(d), Some(q)) => vec![(d, q)],
        (Some(d), None) => vec![(d, 2), (d, 3)],
        (None, Some(q)) => (1..=3).map(|d| (d, q)).collect(),
    }
}

fn dual_polar_cases(
    p: &Params,
    suite: Suite,
    default: &[(usize, u64)],
    body: fn(usize, &Field, u128, f64) -> Result<Report>,
) -> Vec<Case<'static>> {
    let window = p.window(suite);
    let tol = p.tol;
    dual_polar_points(p, default)
        .into_iter()
        .map(|(d, q)| {
            let label = format!("d={d},q={q}");
            match field_or_skip(q) {
                Err(r) => Case::skip(label, r),
                Ok(f) => Case::windowed(label, lagrangian_count(d, q), window, move || body(d, &f, window, tol)),
            }
        })
        .collect()
}

fn drg_body(d: usize, f: &Field, window: u128, _tol: f64) -> Result<Report> {
    let g = build_dual_polar(d, f, window)?;
    let mut report = Report::new();
    let expected = lagrangian_count(d, f.q());
    report.push(Check::holds("dualpolar/vertex_count", g.len() as u128 == expected, || {
        format!("{} vertices, expected {expected}", g.len())
    }));
    report.insert("vertices", g.len());
    report.extend(check_distance_regularity(&g)?.0);
    Ok(report)
}

/// `theta_j = q [d - j] - [j]` with Gaussian brackets.
fn dual_polar_spectrum_closed_form(d: usize, q: u64) -> Vec<BigRational> {
    (0..=d as u32)
        .map(|j| {
            let v = BigInt::from(q) * BigInt::from(qbracket_gauss(d as u32 - j, q)) - BigInt::from(qbracket_gauss(j, q));
            BigRational::from_integer(v)
        })
        .collect()
}

fn spectrum_report(arr: &IntersectionArray, d: usize, q: u64, n: usize) -> Result<Report> {
    let mut report = Report::new();
    let theta = arr.eigenvalues()?;
    let mult = arr.multiplicities(&theta);
    let expected = dual_polar_spectrum_closed_form(d, q);
    report.push(Check::holds("spectrum/closed_form", theta == expected, || {
        format!("eigenvalues {:?}", theta.iter().map(ToString::to_string).collect::<Vec<_>>())
    }));
    let total: BigRational = mult.iter().sum();
    let integral = mult.iter().all(|m| m.is_integer() && *m > BigRational::from_integer(0.into()));
    report.push(Check::holds("spectrum/multiplicities", integral && total == BigRational::from_integer(n.into()), || {
        format!("multiplicities {:?}", mult.iter().map(ToString::to_string).collect::<Vec<_>>())
    }));
    let pairs: Vec<(String, String)> = theta.iter().zip(&mult).map(|(t, m)| (t.to_string(), m.to_string())).collect();
    report.insert("spectrum", pairs);
    Ok(report)
}

fn dqk_body(d: usize, f: &Field, window: u128, _tol: f64) -> Result<Report> {
    let g = build_dual_polar(d, f, window)?;
    let (drg, arr) = check_distance_regularity(&g)?;
    let Some(arr) = arr else {
        return Ok(drg);
    };
    let e = QuarterInt::from_int(1);
    let mut report = check_ttr2(&g, e)?;
    report.extend(check_dqk_identity(&g, &arr, e)?);
    report.extend(spectrum_report(&arr, d, f.q(), g.len())?);
    Ok(report)
}

fn scheme_dual_polar_body(d: usize, f: &Field, window: u128, _tol: f64) -> Result<Report> {
    let g = build_dual_polar(d, f, window)?;
    Ok(check_scheme(g.distance_matrices())?.0)
}

fn ws_body(d: usize, f: &Field, window: u128, tol: f64) -> Result<Report> {
    let g = build_dual_polar(d, f, window)?;
    check_ws_decomposition(&g, tol)
}

fn scheme_cases(p: &Params) -> Vec<Case<'static>> {
    let window = p.window(Suite::Scheme);
    let mut cases: Vec<Case<'static>> = p
        .sizes(1..=5)
        .into_iter()
        .map(|n| {
            let label = format!("hamming,n={n}");
            if n > MAX_HAMMING_N {
                return Case::skip(label, format!("n = {n} exceeds {MAX_HAMMING_N}"));
            }
            Case::windowed(label, 1u128 << n, window, move || Ok(check_scheme(hamming_distance_matrices(n)?.matrices())?.0))
        })
        .collect();
    let dp = dual_polar_cases(p, Suite::Scheme, &[(1, 2), (2, 2), (1, 3), (2, 3)], scheme_dual_polar_body);
    cases.extend(dp.into_iter().map(|c| Case { label: format!("dualpolar,{}", c.label), run: c.run }));
    cases
}

fn cases_for(suite: Suite, p: &Params) -> Vec<Case<'static>> {
    const DRG: [(usize, u64); 7] = [(1, 2), (2, 2), (3, 2), (4, 2), (1, 3), (2, 3), (3, 3)];
    const SMALL: [(usize, u64); 6] = [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3), (3, 3)];
    const WS: [(usize, u64); 4] = [(1, 2), (2, 2), (1, 3), (2, 3)];
    match suite {
        Suite::LatticeUq => lattice_uq_cases(p),
        Suite::CubeTensor => cube_tensor_cases(p),
        Suite::Hamming => hamming_cases(p),
        Suite::Quotient => quotient_cases(p),
        Suite::DualpolarDrg => dual_polar_cases(p, suite, &DRG, drg_body),
        Suite::DualpolarDqk => dual_polar_cases(p, suite, &SMALL, dqk_body),
        Suite::Scheme => scheme_cases(p),
        Suite::WsDecomp => dual_polar_cases(p, suite, &WS, ws_body),
        Suite::All => Suite::COMPONENTS
            .iter()
            .flat_map(|&s| {
                cases_for(s, p).into_iter().map(move |c| Case { label: format!("{}/{}", s.name(), c.label), run: c.run })
            })
            .collect(),
    }
}

/// Runs a suite. Outputs depend only on `suite` and `params`.
pub fn run_suite(suite: Suite, params: &Params) -> SuiteReport {
    let report = run_cases(cases_for(suite, params), params.timings);
    SuiteReport::new(suite, params, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: Option<usize>, q: Option<u64>) -> Params {
        Params { n, q, ..Params::default() }
    }

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn quotient_single_point() {
        let r = run_suite(Suite::Quotient, &params(Some(2), Some(2)));
        assert!(r.all_passed());
        assert_eq!(r.summary.skipped, 0);
        assert!(r.checks.iter().any(|c| c.name == "n=2,q=2/quotient/y_zeta"));
    }

    #[test]
    fn unsupported_q_is_skipped() {
        let r = run_suite(Suite::Quotient, &params(Some(2), Some(6)));
        assert_eq!(r.summary.skipped, 1);
        assert!(r.all_passed());
        let r = run_suite(Suite::WsDecomp, &params(Some(3), Some(7)));
        assert_eq!(r.summary.skipped, 1);
    }

    #[test]
    fn closed_form_spectrum() {
        let s: Vec<String> = dual_polar_spectrum_closed_form(2, 2).iter().map(ToString::to_string).collect();
        assert_eq!(s, ["6", "1", "-3"]);
    }

    #[test]
    fn dqk_suite_small() {
        let r = run_suite(Suite::DualpolarDqk, &params(Some(2), Some(2)));
        assert!(r.all_passed(), "{}", r.to_text());
        assert_eq!(r.data["d=2,q=2/spectrum"], serde_json::json!([["6", "1"], ["1", "9"], ["-3", "5"]]));
    }

    #[test]
    fn text_format_has_summary() {
        let r = run_suite(Suite::Hamming, &params(Some(2), None));
        let text = r.to_text();
        assert!(text.starts_with("qlab-report/1 suite=hamming n=2"));
        assert!(text.trim_end().ends_with("0 failed, 0 skipped"));
    }
}
