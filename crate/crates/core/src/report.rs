//! Machine-readable verification reports.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::SocleError;
use crate::linalg::Tolerance;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// Present exactly when the check failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    /// The failure came from the numerics rather than from the property.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub numeric: bool,
}

impl Check {
    /// The witness closure only runs on failure.
    pub fn new(name: impl Into<String>, pass: bool, residual: Option<f64>, witness: impl FnOnce() -> Value) -> Self {
        Check { name: name.into(), pass, residual, witness: (!pass).then(witness), numeric: false }
    }

    pub fn passed(name: impl Into<String>, residual: Option<f64>) -> Self {
        Check::new(name, true, residual, || Value::Null)
    }

    /// A check that could not be evaluated.
    pub fn errored(name: impl Into<String>, err: &SocleError) -> Self {
        Check {
            name: name.into(),
            pass: false,
            residual: None,
            witness: Some(serde_json::json!({ "error": err.to_string() })),
            numeric: err.is_numeric(),
        }
    }

    /// Passes when `residual <= bound`.
    pub fn bounded(name: impl Into<String>, residual: f64, bound: f64, witness: impl FnOnce() -> Value) -> Self {
        Check::new(name, residual <= bound, Some(residual), witness)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: Tolerance,
    /// Command output, flattened into the top level.
    #[serde(flatten)]
    pub result: Map<String, Value>,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Seconds; the only field allowed to differ between identical runs.
    pub wall_time: f64,
}

impl Report {
    pub fn new(command: Vec<String>, seed: Option<u64>, tolerances: Tolerance) -> Self {
        Report { command, seed, tolerances, result: Map::new(), checks: Vec::new(), pass: true, wall_time: 0.0 }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.result.insert(key.to_string(), v);
    }

    /// Only numeric failures, no property failures.
    pub fn numeric_only_failure(&self) -> bool {
        !self.pass && self.checks.iter().filter(|c| !c.pass).all(|c| c.numeric)
    }
}
