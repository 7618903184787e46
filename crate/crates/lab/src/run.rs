//! Runs a configuration and writes the report tree:
//!
//! ```text
//! <out>/summary.json
//! <out>/<NN>_<space>/<suite>.json
//! <out>/<NN>_<space>/residuals.csv
//! <out>/<NN>_<space>/payloads/<suite>_<k>_<check>.json
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use tgasum_core::search::sub_seed;
use tgasum_core::verify::{self, CheckStatus, ReplayOutcome};
use tgasum_core::Space;

use crate::config::{ExperimentConfig, Format, Suite};
use crate::report::{self, Counts, Failure, ReportEntry, SuiteReport, Summary, SCHEMA_VERSION};
use crate::suites::{self, SuiteOutput};

pub struct RunOutcome {
    pub summary: Summary,
    pub out_dir: PathBuf,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }
}

fn slug(label: &str) -> String {
    let mut s: String = label.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    while s.contains("__") {
        s = s.replace("__", "_");
    }
    s.trim_matches('_').to_string()
}

/// Seed of the (space, suite) cell.
pub fn cell_seed(seed: u64, space_index: usize, suite: Suite) -> u64 {
    sub_seed(sub_seed(seed, space_index as u64), suite.tag())
}

/// Runs every (space, suite) cell on the current rayon pool and writes the reports.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let specs = cfg.resolved_spaces()?;
    let spaces: Vec<Space> = specs.iter().map(Space::new).collect::<Result<_, _>>()?;
    let seed = cfg.budget.seed;
    let cells: Vec<(usize, Suite)> =
        (0..spaces.len()).flat_map(|i| cfg.suites.iter().map(move |&s| (i, s))).collect();
    let outputs: Vec<Result<SuiteOutput>> = cells
        .par_iter()
        .map(|&(i, suite)| {
            suites::run_suite(suite, &spaces[i], &cfg.budget, cell_seed(seed, i, suite))
                .with_context(|| format!("suite {} on {}", suite.name(), spaces[i].label()))
        })
        .collect();

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let json = cfg.output.formats.contains(&Format::Json);
    let csv = cfg.output.formats.contains(&Format::Csv);
    let mut total = Counts::default();
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (&(i, suite), output) in cells.iter().zip(outputs) {
        let output = output?;
        let space = &spaces[i];
        let dir_name = format!("{i:02}_{}", slug(&space.label()));
        let dir = out.join(&dir_name);
        fs::create_dir_all(&dir)?;
        let counts = Counts::of(&output.checks, output.estimates.len());
        total.add(&counts);
        for (k, c) in output.checks.iter().enumerate() {
            let payload_file = match &c.payload {
                Some(p) => {
                    let pdir = dir.join("payloads");
                    fs::create_dir_all(&pdir)?;
                    let name = format!("{}_{k}_{}.json", suite.name(), slug(&c.check));
                    report::write_json(&pdir.join(&name), p)?;
                    Some(format!("{dir_name}/payloads/{name}"))
                }
                None => None,
            };
            if c.status == CheckStatus::CounterexampleFound {
                failures.push(Failure { space: space.label(), suite, check: c.check.clone(), payload: payload_file });
            }
        }
        if csv {
            if let Some(rows) = &output.residuals {
                report::write_residuals(&dir.join("residuals.csv"), rows)?;
            }
        }
        let file = json.then(|| format!("{dir_name}/{}.json", suite.name()));
        if json {
            let rep = SuiteReport {
                schema_version: SCHEMA_VERSION,
                suite,
                space: space.label(),
                spec: specs[i].clone(),
                seed: cell_seed(seed, i, suite),
                counts,
                summary: output.summary.clone(),
                checks: output.checks,
                estimates: output.estimates,
                data: output.data,
            };
            report::write_json(&dir.join(format!("{}.json", suite.name())), &rep)?;
        }
        entries.push(ReportEntry { space: space.label(), suite, file, counts, summary: output.summary });
    }
    let exit_code = if failures.is_empty() { 0 } else { 1 };
    let summary = Summary { schema_version: SCHEMA_VERSION, seed, counts: total, reports: entries, failures, exit_code };
    report::write_json(&out.join("summary.json"), &summary)?;
    Ok(RunOutcome { summary, out_dir: out.to_path_buf() })
}

/// Reads a payload file and recomputes it.
pub fn replay_file(path: &Path) -> Result<ReplayOutcome> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let payload: verify::Payload =
        serde_json::from_str(&text).with_context(|| format!("malformed payload {}", path.display()))?;
    Ok(verify::replay(&payload)?)
}
