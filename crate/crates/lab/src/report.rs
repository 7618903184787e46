//! Report records and writers.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tgasum_core::constants::ConstantEstimate;
use tgasum_core::verify::{CheckReport, CheckStatus, ResidualRow};
use tgasum_core::SpaceSpec;

use crate::config::Suite;

pub const SCHEMA_VERSION: u32 = 1;

/// Header of the residual CSV files.
pub const RESIDUAL_COLUMNS: [&str; 4] = ["n", "greedy", "cesaro", "vp"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub checks: u64,
    pub exact_pass: u64,
    pub consistent_within_budget: u64,
    pub counterexample_found: u64,
    pub precondition_failed: u64,
    pub inconclusive: u64,
    pub estimates: u64,
}

impl Counts {
    pub fn of(checks: &[CheckReport], estimates: usize) -> Self {
        let mut c = Counts { estimates: estimates as u64, ..Counts::default() };
        for r in checks {
            c.checks += 1;
            match r.status {
                CheckStatus::ExactPass => c.exact_pass += 1,
                CheckStatus::ConsistentWithinBudget => c.consistent_within_budget += 1,
                CheckStatus::CounterexampleFound => c.counterexample_found += 1,
                CheckStatus::PreconditionFailed => c.precondition_failed += 1,
                CheckStatus::Inconclusive => c.inconclusive += 1,
            }
        }
        c
    }

    pub fn add(&mut self, o: &Counts) {
        self.checks += o.checks;
        self.exact_pass += o.exact_pass;
        self.consistent_within_budget += o.consistent_within_budget;
        self.counterexample_found += o.counterexample_found;
        self.precondition_failed += o.precondition_failed;
        self.inconclusive += o.inconclusive;
        self.estimates += o.estimates;
    }
}

/// One (space, suite) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: Suite,
    pub space: String,
    pub spec: SpaceSpec,
    pub seed: u64,
    pub counts: Counts,
    pub summary: Vec<String>,
    pub checks: Vec<CheckReport>,
    pub estimates: Vec<ConstantEstimate>,
    pub data: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub space: String,
    pub suite: Suite,
    pub file: Option<String>,
    pub counts: Counts,
    pub summary: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub space: String,
    pub suite: Suite,
    pub check: String,
    pub payload: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub seed: u64,
    pub counts: Counts,
    pub reports: Vec<ReportEntry>,
    pub failures: Vec<Failure>,
    pub exit_code: i32,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

pub fn write_residuals(path: &Path, rows: &[ResidualRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(RESIDUAL_COLUMNS)?;
    for r in rows {
        w.serialize((r.n, r.greedy, r.cesaro, r.vp))?;
    }
    w.flush()?;
    Ok(())
}
