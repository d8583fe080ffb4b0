//! Check records and suite reports.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    BudgetExhausted,
}

/// One line of a report. `witness` carries the counterexample for a
/// failure, the reason for a skip, and a short certificate for a pass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub instance: String,
    pub status: Status,
    pub witness: String,
    pub millis: u64,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    pub seed: u64,
    pub fingerprint: String,
    pub millis: u64,
}

impl VerificationReport {
    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn is_ok(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} pass, {} fail, {} skipped, {} budget-exhausted ({} ms)",
            self.suite,
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped),
            self.count(Status::BudgetExhausted),
            self.millis
        )
    }

    /// Records without timings, for comparing runs.
    pub fn normalized(&self) -> Vec<CheckRecord> {
        self.checks.iter().map(|c| CheckRecord { millis: 0, ..c.clone() }).collect()
    }
}

/// The report file: all records of all suites as one JSON array.
pub fn to_json(reports: &[VerificationReport]) -> String {
    let all: Vec<&CheckRecord> = reports.iter().flat_map(|r| &r.checks).collect();
    serde_json::to_string_pretty(&all).expect("records serialize")
}

pub fn fingerprint() -> String {
    format!(
        "unialg {} on {}-{}, {} threads",
        env!("CARGO_PKG_VERSION"),
        std::env::consts::OS,
        std::env::consts::ARCH,
        rayon::current_num_threads()
    )
}
