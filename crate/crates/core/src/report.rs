//! Verification reports: one record per check, aggregated per run.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub instance: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Value>,
    pub millis: u64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    /// Runs `f`, which returns a witness on failure, and records the outcome.
    pub fn run(&mut self, check: &str, instance: &str, f: impl FnOnce() -> Option<Value>) -> bool {
        let start = Instant::now();
        let witness = f();
        let status = if witness.is_none() { Status::Pass } else { Status::Fail };
        self.checks.push(CheckResult {
            check: check.to_string(),
            instance: instance.to_string(),
            status,
            witness,
            millis: start.elapsed().as_millis() as u64,
        });
        status == Status::Pass
    }

    /// Records an outcome computed elsewhere.
    pub fn record(&mut self, check: &str, instance: &str, witness: Option<Value>, millis: u64) {
        let status = if witness.is_none() { Status::Pass } else { Status::Fail };
        self.checks.push(CheckResult { check: check.into(), instance: instance.into(), status, witness, millis });
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    pub fn get(&self, check: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == check)
    }

    pub fn passed(&self, check: &str) -> bool {
        self.get(check).map(|c| c.passed()).unwrap_or(false)
    }

    /// Deterministic order: by check id, then instance, then witness text.
    pub fn sort(&mut self) {
        self.checks.sort_by(|a, b| {
            (&a.check, &a.instance, a.witness.as_ref().map(|w| w.to_string()))
                .cmp(&(&b.check, &b.instance, b.witness.as_ref().map(|w| w.to_string())))
        });
    }

    /// The report with timing fields zeroed, for byte-level comparisons.
    pub fn canonical(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.millis = 0;
        }
        r.sort();
        r
    }
}
