//! Check results and structured report emission.

use serde::Serialize;
use std::time::Instant;

/// Outcome of one named identity check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    /// stable identifier, e.g. `algebra.oscillator_ccr`
    pub id: String,
    /// one-line statement of the identity being verified
    pub identity: String,
    /// truncation sizes the check ran at
    pub truncation: String,
    /// dimension of the protected subspace the residual was measured on
    pub protected_dim: usize,
    /// worst residual observed
    pub residual: f64,
    /// pass threshold (after any tolerance scaling)
    pub tolerance: f64,
    pub passed: bool,
    /// a check with an empty protected subspace is skipped, never passed
    pub skipped: bool,
    pub wall_ms: f64,
}

impl CheckResult {
    pub fn status(&self) -> &'static str {
        if self.skipped {
            "SKIP"
        } else if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// Collects results for one suite run.
#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub seed: u64,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn new(seed: u64) -> Self {
        Report {
            seed,
            results: Vec::new(),
        }
    }

    /// Record a residual-style check. `protected_dim == 0` marks it skipped.
    pub fn record(
        &mut self,
        id: &str,
        identity: &str,
        truncation: String,
        protected_dim: usize,
        residual: f64,
        tolerance: f64,
        started: Instant,
    ) -> &CheckResult {
        let skipped = protected_dim == 0;
        let passed = !skipped && residual.is_finite() && residual <= tolerance;
        self.results.push(CheckResult {
            id: id.to_string(),
            identity: identity.to_string(),
            truncation,
            protected_dim,
            residual,
            tolerance,
            passed,
            skipped,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        self.results.last().unwrap()
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed || r.skipped)
    }

    pub fn merge(&mut self, other: Report) {
        self.results.extend(other.results);
    }

    /// Keep only checks whose id contains the filter substring.
    pub fn matches(id: &str, only: Option<&str>) -> bool {
        match only {
            None => true,
            Some(f) => id.contains(f),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV with full 17-significant-digit values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "id,identity,truncation,protected_dim,residual,tolerance,status,wall_ms\n",
        );
        for r in &self.results {
            out.push_str(&format!(
                "{},\"{}\",\"{}\",{},{:.17e},{:.17e},{},{:.3}\n",
                r.id,
                r.identity.replace('"', "'"),
                r.truncation,
                r.protected_dim,
                r.residual,
                r.tolerance,
                r.status(),
                r.wall_ms
            ));
        }
        out
    }

    /// One line per check, human-readable.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&format!(
                "[{:4}] {:44} residual {:9.3e}  (tol {:8.1e}, dim {:6}, {:7.1} ms)\n",
                r.status(),
                r.id,
                r.residual,
                r.tolerance,
                r.protected_dim,
                r.wall_ms
            ));
        }
        let passed = self.results.iter().filter(|r| r.passed).count();
        let failed = self.results.iter().filter(|r| !r.passed && !r.skipped).count();
        let skipped = self.results.iter().filter(|r| r.skipped).count();
        out.push_str(&format!(
            "{} checks: {passed} passed, {failed} failed, {skipped} skipped\n",
            self.results.len()
        ));
        out
    }
}
