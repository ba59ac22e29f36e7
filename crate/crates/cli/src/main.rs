//! Reproducible experiment runner: builds cluster-state layouts, samples
//! and scores shots, and emits plot-ready CSV tables from one JSON config.
//!
//! Exit codes: 0 success, 2 invalid config, 3 estimator-capacity refusal.

mod config;
mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{CliError, CodeKind, ExperimentConfig};

#[derive(Parser)]
#[command(version, about = "Partial-gap postselection workbench", propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for shot scoring (default: all cores). Output bytes
    /// do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Override the config's RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment config and write result tables.
    Run { config: PathBuf },
    /// Check a config (schema and estimator capacity) without running.
    Validate { config: PathBuf },
    /// Print the detector error model of one layout as text.
    Dem { code: String, d: usize, p: f64 },
}

fn main() {
    let cli = Cli::parse();
    let outcome = dispatch(cli);
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            run::run(&cfg, cli.workers)
        }
        Command::Validate { config } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            run::validate(&cfg)
        }
        Command::Dem { code, d, p } => {
            let code: CodeKind = code.parse()?;
            run::dump_dem(code, d, p)
        }
    }
}
