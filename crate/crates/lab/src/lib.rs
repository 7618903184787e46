//! Experiment runner around `tgasum-core`: experiment configs, the suite
//! catalog, a rayon executor, JSON/CSV report writing and payload replay.

pub mod catalog;
pub mod config;
pub mod exec;
pub mod report;
pub mod run;
pub mod suites;

pub use config::{ExperimentConfig, Suite};
pub use run::{replay_file, run, RunOutcome};
