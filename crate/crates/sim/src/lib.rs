//! Experiment harness for the batched and collaborative bandit simulations
//! in `collab-bandit-core`.
//!
//! An experiment is described by an [`ExperimentConfig`] (TOML), executed
//! over seeded trials on a worker pool, and reported as `trials.csv`,
//! `aggregate.csv` and `summary.txt`. Results are merged in trial order, so
//! the files do not depend on the number of worker threads.

pub mod config;
pub mod experiment;
pub mod lb_suite;
pub mod output;
pub mod runner;

use std::path::Path;

use anyhow::Result;

pub use config::{ExperimentConfig, ExperimentKind};
pub use output::{Check, Report, Table};
pub use runner::Runner;

/// Runs the configured experiment and returns its report without writing
/// anything.
pub fn run_experiment(config: &ExperimentConfig, threads: usize) -> Result<Report> {
    config.validate()?;
    let runner = Runner::new(threads)?;
    match config.experiment {
        ExperimentKind::LbChecks => lb_suite::run_lb_checks(config, &runner),
        _ => Ok(experiment::run_simulation(config, &runner)?.1),
    }
}

/// Runs the experiment and writes its three output files into `out`.
pub fn run_to_dir(config: &ExperimentConfig, threads: usize, out: &Path) -> Result<Report> {
    let report = run_experiment(config, threads)?;
    let title = format!(
        "experiment {} (seed {}, trials {})",
        config.experiment, config.seed, config.trials
    );
    report.write(out, &title)?;
    Ok(report)
}
