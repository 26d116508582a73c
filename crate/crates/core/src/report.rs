//! Pass/fail records shared by every verification routine.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::operator::Operator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// One verified statement. `residual` is `"0"` for an exact identity that
/// holds, the offending entry for one that fails, or a max-abs float.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<u64>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Pass, residual: "0".into(), witness: None, wall_ms: None }
    }

    pub fn fail(name: impl Into<String>, residual: impl Into<String>, witness: Option<String>) -> Self {
        Check { name: name.into(), status: Status::Fail, residual: residual.into(), witness, wall_ms: None }
    }

    pub fn skip(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Skip,
            residual: "-".into(),
            witness: Some(reason.into()),
            wall_ms: None,
        }
    }

    /// Passes iff `residual` is identically zero.
    pub fn exact(name: impl Into<String>, residual: &Operator) -> Self {
        match residual.first_nonzero() {
            None => Check::pass(name),
            Some((i, j, v)) => Check::fail(
                name,
                v.to_string(),
                Some(format!("entry ({}, {})", residual.row_labels()[i], residual.col_labels()[j])),
            ),
        }
    }

    /// Boolean exact statement with an optional witness on failure.
    pub fn holds(name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Check::pass(name)
        } else {
            let w = witness();
            Check::fail(name, "nonzero", Some(w))
        }
    }

    /// Floating check: passes iff `residual <= tol`.
    pub fn float(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        let status = if residual <= tol { Status::Pass } else { Status::Fail };
        Check {
            name: name.into(),
            status,
            residual: format!("{residual:.3e}"),
            witness: (status == Status::Fail).then(|| format!("tolerance {tol:.1e}")),
            wall_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        write!(f, "[{tag}] {} (residual {})", self.name, self.residual)?;
        if let Some(w) = &self.witness {
            write!(f, " -- {w}")?;
        }
        Ok(())
    }
}

/// Checks plus any derived data worth reporting (intersection arrays, spectra...).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, serde_json::Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.data.extend(other.data);
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Serialize) {
        self.data.insert(key.into(), serde_json::to_value(value).expect("report data serializes"));
    }

    /// Prefixes every check name with `prefix/`.
    pub fn scoped(mut self, prefix: &str) -> Self {
        for c in &mut self.checks {
            c.name = format!("{prefix}/{}", c.name);
        }
        self.data = self.data.into_iter().map(|(k, v)| (format!("{prefix}/{k}"), v)).collect();
        self
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
