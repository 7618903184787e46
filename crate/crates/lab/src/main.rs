use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use tgasum::catalog;
use tgasum::config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "tgasum", version, about = "Greedy summation constants: experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites of a config file and write reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed (overrides `budget.seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Recompute a stored payload and print both sides.
    Replay { payload: PathBuf },
    /// Print the space presets.
    ListSpaces {
        #[arg(long, default_value_t = 8)]
        cap: usize,
    },
}

fn usage(e: anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::Run { config, out, seed, jobs } => {
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            if let Some(s) = seed {
                cfg.budget.seed = s;
            }
            let Some(out) = out.or_else(|| cfg.output.dir.clone()) else {
                return usage(anyhow::anyhow!("no output directory: pass --out or set output.dir"));
            };
            let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build().context("thread pool");
            let result = pool.and_then(|p| p.install(|| tgasum::run(&cfg, &out)));
            match result {
                Ok(outcome) => {
                    let s = &outcome.summary;
                    for e in &s.reports {
                        println!("{} / {}: {} checks, {} estimates", e.space, e.suite.name(), e.counts.checks, e.counts.estimates);
                        for line in &e.summary {
                            println!("  {line}");
                        }
                    }
                    for f in &s.failures {
                        eprintln!(
                            "FAILED {} / {} / {}: payload {}",
                            f.space,
                            f.suite.name(),
                            f.check,
                            f.payload.as_deref().map(|p| outcome.out_dir.join(p).display().to_string()).unwrap_or_default()
                        );
                    }
                    println!("summary: {}", outcome.out_dir.join("summary.json").display());
                    ExitCode::from(outcome.exit_code() as u8)
                }
                Err(e) => usage(e),
            }
        }
        Command::Replay { payload } => match tgasum::replay_file(&payload) {
            Ok(r) => {
                println!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
                println!("lhs = {}", r.lhs);
                println!("rhs = {}", r.rhs);
                if let Some(m) = &r.mismatch {
                    println!("mismatch: {m}");
                }
                if r.holds && r.mismatch.is_none() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => usage(e),
        },
        Command::ListSpaces { cap } => {
            for (name, desc) in catalog::PRESETS {
                let spec = catalog::preset(name, cap).expect("listed preset");
                println!("{name:<24} {desc}");
                println!("{:<24} {}", "", serde_json::to_string(&spec).expect("serializable"));
            }
            ExitCode::SUCCESS
        }
    }
}
