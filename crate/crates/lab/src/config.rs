//! Experiment configuration (TOML or JSON).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use tgasum_core::search::{SearchConfig, SearchMode};
use tgasum_core::SpaceSpec;

use crate::catalog;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Constants,
    Thresholds,
    Psi,
    Subsequences,
    Democracy,
    Classify,
    Question1,
    Question2,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Identities,
        Suite::Constants,
        Suite::Thresholds,
        Suite::Psi,
        Suite::Subsequences,
        Suite::Democracy,
        Suite::Classify,
        Suite::Question1,
        Suite::Question2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Constants => "constants",
            Suite::Thresholds => "thresholds",
            Suite::Psi => "psi",
            Suite::Subsequences => "subsequences",
            Suite::Democracy => "democracy",
            Suite::Classify => "classify",
            Suite::Question1 => "question1",
            Suite::Question2 => "question2",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

/// A catalog preset by name, or a full space description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceEntry {
    Preset {
        preset: String,
        #[serde(default)]
        dimension_cap: Option<usize>,
    },
    Spec(SpaceSpec),
}

impl SpaceEntry {
    pub fn resolve(&self) -> anyhow::Result<SpaceSpec> {
        match self {
            SpaceEntry::Spec(s) => Ok(s.clone()),
            SpaceEntry::Preset { preset, dimension_cap } => {
                catalog::preset(preset, dimension_cap.unwrap_or(catalog::DEFAULT_CAP))
                    .with_context(|| format!("unknown space preset {preset:?} (see list-spaces)"))
            }
        }
    }
}

fn default_window() -> usize {
    6
}
fn default_identity_samples() -> usize {
    10_000
}
fn default_log_window_samples() -> usize {
    1_000
}
fn default_classify_windows() -> Vec<usize> {
    vec![4, 6, 8]
}
fn default_question1_dims() -> Vec<usize> {
    vec![8, 16, 32, 64]
}
fn default_question_samples() -> usize {
    2_000
}
fn default_horizon() -> usize {
    512
}
fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    pub seed: u64,
    /// Index window of the constant searches.
    #[serde(default = "default_window")]
    pub window: usize,
    /// Random search with this many candidates; exhaustive when absent.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default = "default_identity_samples")]
    pub identity_samples: usize,
    #[serde(default = "default_log_window_samples")]
    pub log_window_samples: usize,
    #[serde(default = "default_classify_windows")]
    pub classify_windows: Vec<usize>,
    #[serde(default = "default_question1_dims")]
    pub question1_dims: Vec<usize>,
    #[serde(default = "default_question_samples")]
    pub question_samples: usize,
    /// Truncation horizon of the convergence suites.
    #[serde(default = "default_horizon")]
    pub horizon: usize,
}

impl Budget {
    /// Search settings for one (space, suite) cell.
    pub fn search(&self, cap: usize, seed: u64) -> SearchConfig {
        let window = self.window.min(cap);
        match self.samples {
            Some(samples) => SearchConfig::random(window, samples, seed),
            None => SearchConfig { seed, ..SearchConfig::exhaustive(window) },
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        self.samples.is_none()
    }

    pub fn mode(&self) -> SearchMode {
        match self.samples {
            Some(samples) => SearchMode::Random { samples },
            None => SearchMode::Exhaustive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: None, formats: default_formats() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spaces: Vec<SpaceEntry>,
    pub suites: Vec<Suite>,
    pub budget: Budget,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: ExperimentConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        } else {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.spaces.is_empty() {
            bail!("config lists no spaces");
        }
        if self.suites.is_empty() {
            bail!("config lists no suites");
        }
        let mut s = self.suites.clone();
        s.sort();
        s.dedup();
        if s.len() != self.suites.len() {
            bail!("a suite is listed twice");
        }
        if self.output.formats.is_empty() {
            bail!("no output format");
        }
        let b = &self.budget;
        if b.window == 0 || b.samples == Some(0) || b.identity_samples == 0 || b.horizon < 2 {
            bail!("budget window, samples, identity_samples must be positive and horizon at least 2");
        }
        for e in &self.spaces {
            tgasum_core::Space::new(&e.resolve()?)?;
        }
        Ok(())
    }

    pub fn resolved_spaces(&self) -> anyhow::Result<Vec<SpaceSpec>> {
        self.spaces.iter().map(SpaceEntry::resolve).collect()
    }
}
