use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use collab_bandit_sim::{run_to_dir, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(
    name = "collab-bandit-sim",
    version,
    about = "Batched and collaborative bandit experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        experiment: Option<ExperimentKind>,
    },
}

fn run(cli: Cli) -> Result<bool> {
    let Command::Run {
        config,
        seed,
        trials,
        threads,
        out,
        experiment,
    } = cli.command;
    let mut config = ExperimentConfig::load(&config)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(trials) = trials {
        config.trials = trials;
    }
    if let Some(out) = out {
        config.out = out;
    }
    if let Some(kind) = experiment {
        config.experiment = kind;
    }
    config.validate()?;
    let report = run_to_dir(&config, threads, &config.out)?;
    for check in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {}: {}", check.name, check.detail);
    }
    println!(
        "{} checks, {} failed; results in {}",
        report.checks.len(),
        report.checks.iter().filter(|c| !c.passed).count(),
        config.out.display()
    );
    Ok(report.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
