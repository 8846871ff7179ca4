//! Monte Carlo experiments over seeded trials.

use anyhow::Result;
use collab_bandit_core::batched::{
    analytic_regret_bound, analytic_round_bound, batch_grid, run_batched_mab, BatchConfig, BatchRun,
};
use collab_bandit_core::collab::{
    reduce_batched_to_collab, round_ratio_certificate, run_no_comm_baseline, CollabConfig,
};
use collab_bandit_core::regret::RegretEstimate;
use collab_bandit_core::Instance;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::{fmt_f64, fmt_flag, Check, Report, Table};
use crate::runner::{trial_stream, Runner};

pub const TRIAL_COLUMNS: &[&str] = &[
    "instance",
    "R",
    "lambda_grid",
    "trial",
    "total_regret",
    "rounds_used",
    "comm_steps",
    "star_eliminated",
    "e2_holds",
    "deadline_ok",
    "reduction_exact",
    "fact1_ok",
    "pulls_per_arm",
    "elimination_rounds",
];

pub const SWEEP_COLUMNS: &[&str] = &[
    "instance",
    "R",
    "lambda_grid",
    "mean_regret",
    "halfwidth",
    "mean_rounds",
    "max_rounds",
    "analytic_regret_bound",
    "analytic_round_bound",
    "star_elim_count",
    "trials",
];

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub total_regret: f64,
    pub rounds_used: u32,
    pub comm_steps: usize,
    pub star_eliminated: bool,
    /// Concentration event `E_2` held for every recorded estimate.
    pub e2_holds: bool,
    /// Every suboptimal arm was gone by its analytic deadline `r(a)`.
    pub deadline_ok: bool,
    pub reduction_exact: Option<bool>,
    pub fact1_ok: Option<bool>,
    pub pulls: Vec<u64>,
    /// Batch in which each arm was eliminated (the baseline reports the
    /// latest over agents).
    pub elimination_rounds: Vec<Option<u32>>,
}

/// Aggregate over the trials of one (instance, R) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub instance: String,
    pub rounds: u32,
    pub lambda_grid: f64,
    pub mean_regret: f64,
    pub halfwidth: f64,
    pub mean_rounds: f64,
    pub max_rounds: u32,
    pub analytic_regret_bound: f64,
    pub analytic_round_bound: u32,
    pub star_elim_count: u64,
    pub trials: u64,
    /// Largest possible regret of a single trial; the Hoeffding range.
    pub regret_range: f64,
    pub min_gap: Option<f64>,
}

/// All trials of one cell, with the cell's summary.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub row: SweepRow,
    pub records: Vec<TrialRecord>,
}

fn batch_record(run: &BatchRun, instance: &Instance, trial: u64) -> TrialRecord {
    TrialRecord {
        trial,
        total_regret: run.total_regret,
        rounds_used: run.rounds_used(),
        comm_steps: run.rounds_used().saturating_sub(1) as usize,
        star_eliminated: run.star_eliminated,
        e2_holds: run.concentration_event_holds(instance),
        deadline_ok: run.eliminations_within_deadline(instance),
        reduction_exact: None,
        fact1_ok: None,
        pulls: run.pulls_per_arm.clone(),
        elimination_rounds: run.elimination_round.clone(),
    }
}

struct Cell<'a> {
    label: &'a str,
    instance: &'a Instance,
    rounds: u32,
    lambda_grid: f64,
    regret_bound: f64,
    round_bound: u32,
    total_pulls: u64,
}

fn summarize(cell: &Cell<'_>, records: Vec<TrialRecord>, confidence: f64) -> Result<CellResult> {
    let regrets: Vec<f64> = records.iter().map(|r| r.total_regret).collect();
    let max_gap = cell.instance.gaps().iter().copied().fold(0.0, f64::max);
    let range = cell.total_pulls as f64 * max_gap;
    let estimate = RegretEstimate::from_samples(&regrets, range, confidence)?;
    let n = records.len() as f64;
    let row = SweepRow {
        instance: cell.label.to_owned(),
        rounds: cell.rounds,
        lambda_grid: cell.lambda_grid,
        mean_regret: estimate.mean,
        halfwidth: estimate.halfwidth,
        mean_rounds: records.iter().map(|r| r.rounds_used as f64).sum::<f64>() / n,
        max_rounds: records.iter().map(|r| r.rounds_used).max().unwrap_or(0),
        analytic_regret_bound: cell.regret_bound,
        analytic_round_bound: cell.round_bound,
        star_elim_count: records.iter().filter(|r| r.star_eliminated).count() as u64,
        trials: records.len() as u64,
        regret_range: range,
        min_gap: cell.instance.min_gap(),
    };
    Ok(CellResult { row, records })
}

fn batched_cells(config: &ExperimentConfig, runner: &Runner) -> Result<Vec<CellResult>> {
    let lambda = config.lambda_grid.expect("validated");
    let inner = BatchConfig::new(lambda, config.horizon)?
        .with_budget_mode(config.budget_mode.into())
        .without_transcript();
    let rounds = batch_grid(&inner).len() as u32;
    let mut out = Vec::new();
    for (label, instance) in config.instances()? {
        let records = runner.map(config.trials, |trial| {
            let run = run_batched_mab(&instance, &inner, &trial_stream(config.seed, trial)).expect("valid run");
            batch_record(&run, &instance, trial)
        });
        let cell = Cell {
            label: &label,
            instance: &instance,
            rounds,
            lambda_grid: lambda,
            regret_bound: analytic_regret_bound(&instance, &inner),
            round_bound: analytic_round_bound(&instance, &inner),
            total_pulls: config.horizon,
        };
        out.push(summarize(&cell, records, config.confidence)?);
    }
    Ok(out)
}

fn reduction_cells(config: &ExperimentConfig, runner: &Runner) -> Result<Vec<CellResult>> {
    let lambda = config.lambda_grid.expect("validated");
    let collab = CollabConfig::new(config.agents, config.horizon, lambda)?;
    let inner = collab
        .inner
        .with_budget_mode(config.budget_mode.into())
        .without_transcript();
    let collab = collab.with_inner(inner);
    let rounds = batch_grid(&inner).len() as u32;
    let mut out = Vec::new();
    for (label, instance) in config.instances()? {
        let records = runner.map(config.trials, |trial| {
            let stream = trial_stream(config.seed, trial);
            let run = reduce_batched_to_collab(&instance, &collab, &stream).expect("valid run");
            let batched = run_batched_mab(&instance, &inner, &stream).expect("valid run");
            let mut record = batch_record(&run.batch_runs[0], &instance, trial);
            record.total_regret = run.total_regret;
            record.comm_steps = run.comm_steps;
            record.reduction_exact = Some(
                run.pulls_per_arm_total == batched.pulls_per_arm
                    && run.total_regret.to_bits() == batched.total_regret.to_bits(),
            );
            record.fact1_ok = Some(round_ratio_certificate(&run).meets_threshold);
            record
        });
        let cell = Cell {
            label: &label,
            instance: &instance,
            rounds,
            lambda_grid: lambda,
            regret_bound: analytic_regret_bound(&instance, &inner),
            round_bound: analytic_round_bound(&instance, &inner),
            total_pulls: inner.horizon,
        };
        out.push(summarize(&cell, records, config.confidence)?);
    }
    Ok(out)
}

fn no_comm_cells(config: &ExperimentConfig, runner: &Runner) -> Result<Vec<CellResult>> {
    let lambda = config.lambda_grid.expect("validated");
    let collab = CollabConfig::new(config.agents, config.horizon, lambda)?;
    let single = BatchConfig::new(lambda, config.horizon)?
        .with_budget_mode(config.budget_mode.into())
        .without_transcript();
    let collab = collab.with_inner(single.with_horizon(collab.inner.horizon));
    let mut out = Vec::new();
    for (label, instance) in config.instances()? {
        let records = runner.map(config.trials, |trial| {
            let run = run_no_comm_baseline(&instance, &collab, &trial_stream(config.seed, trial)).expect("valid run");
            let agents = &run.batch_runs;
            TrialRecord {
                trial,
                total_regret: run.total_regret,
                rounds_used: agents.iter().map(BatchRun::rounds_used).max().unwrap_or(0),
                comm_steps: run.comm_steps,
                star_eliminated: agents.iter().any(|r| r.star_eliminated),
                e2_holds: agents.iter().all(|r| r.concentration_event_holds(&instance)),
                deadline_ok: agents.iter().all(|r| r.eliminations_within_deadline(&instance)),
                reduction_exact: None,
                fact1_ok: None,
                pulls: run.pulls_per_arm_total.clone(),
                elimination_rounds: (0..instance.len())
                    .map(|arm| agents.iter().filter_map(|r| r.elimination_round[arm]).max())
                    .collect(),
            }
        });
        let cell = Cell {
            label: &label,
            instance: &instance,
            rounds: 1,
            lambda_grid: lambda,
            regret_bound: config.agents as f64 * analytic_regret_bound(&instance, &single),
            round_bound: analytic_round_bound(&instance, &single),
            total_pulls: config.agents as u64 * config.horizon,
        };
        out.push(summarize(&cell, records, config.confidence)?);
    }
    Ok(out)
}

fn sweep_cells(config: &ExperimentConfig, runner: &Runner) -> Result<Vec<CellResult>> {
    let instances = config.instances()?;
    let mut out = Vec::new();
    for &rounds in &config.rounds {
        let lambda = CollabConfig::lambda_for_rounds(config.agents, config.horizon, rounds);
        let collab = CollabConfig::new(config.agents, config.horizon, lambda)?.with_rounds_cap(rounds);
        let inner = collab
            .inner
            .with_budget_mode(config.budget_mode.into())
            .without_transcript();
        let collab = collab.with_inner(inner);
        for (label, instance) in &instances {
            let records = runner.map(config.trials, |trial| {
                let run =
                    reduce_batched_to_collab(instance, &collab, &trial_stream(config.seed, trial)).expect("valid run");
                let mut record = batch_record(&run.batch_runs[0], instance, trial);
                record.total_regret = run.total_regret;
                record.comm_steps = run.comm_steps;
                record.fact1_ok = Some(round_ratio_certificate(&run).meets_threshold);
                record
            });
            let cell = Cell {
                label,
                instance,
                rounds,
                lambda_grid: lambda,
                regret_bound: analytic_regret_bound(instance, &inner),
                round_bound: analytic_round_bound(instance, &inner),
                total_pulls: inner.horizon,
            };
            out.push(summarize(&cell, records, config.confidence)?);
        }
    }
    Ok(out)
}

fn count_where(records: &[TrialRecord], pred: impl Fn(&TrialRecord) -> bool) -> usize {
    records.iter().filter(|r| pred(r)).count()
}

fn cell_checks(cells: &[CellResult], round_cap: impl Fn(&SweepRow) -> u32) -> Vec<Check> {
    let mut checks = Vec::new();
    for CellResult { row, records } in cells {
        let tag = format!("{} R={}", row.instance, row.rounds);
        checks.push(Check::new(
            format!("regret bound [{tag}]"),
            row.mean_regret <= row.analytic_regret_bound + row.halfwidth,
            format!(
                "mean {:.3} (halfwidth {:.3}) vs bound {:.3}",
                row.mean_regret, row.halfwidth, row.analytic_regret_bound
            ),
        ));
        let e2 = count_where(records, |r| r.e2_holds);
        let over = count_where(records, |r| r.e2_holds && r.rounds_used > row.analytic_round_bound);
        checks.push(Check::new(
            format!("round bound under E2 [{tag}]"),
            over == 0,
            format!("{over} of {e2} E2 trials exceed {}", row.analytic_round_bound),
        ));
        let cap = round_cap(row);
        let over_cap = count_where(records, |r| r.rounds_used > cap);
        checks.push(Check::new(
            format!("round cap [{tag}]"),
            over_cap == 0,
            format!("max rounds {} vs cap {cap}", row.max_rounds),
        ));
        let late = count_where(records, |r| r.e2_holds && !r.deadline_ok);
        checks.push(Check::new(
            format!("elimination deadline under E2 [{tag}]"),
            late == 0,
            format!("{late} of {e2} E2 trials keep an arm past r(a)"),
        ));
        let star_under_e2 = count_where(records, |r| r.e2_holds && r.star_eliminated);
        checks.push(Check::new(
            format!("star survival under E2 [{tag}]"),
            star_under_e2 == 0,
            format!(
                "star eliminated in {} trials, {star_under_e2} of them under E2",
                row.star_elim_count
            ),
        ));
        if records.iter().any(|r| r.reduction_exact.is_some()) {
            let bad = count_where(records, |r| r.reduction_exact == Some(false));
            checks.push(Check::new(
                format!("reduction exactness [{tag}]"),
                bad == 0,
                format!("{bad} trials differ from the batched run"),
            ));
        }
        if records.iter().any(|r| r.fact1_ok.is_some()) {
            let bad = count_where(records, |r| r.fact1_ok == Some(false));
            checks.push(Check::new(
                format!("round ratio certificate [{tag}]"),
                bad == 0,
                format!("{bad} runs without a round reaching (KT)^(1/R)"),
            ));
        }
    }
    checks
}

/// Worst-of-instances mean regret per `R`, in grid order:
/// `(R, lambda_grid, mean, halfwidth, min_gap)`.
pub fn worst_per_round(rows: &[SweepRow]) -> Vec<(u32, f64, f64, f64, Option<f64>)> {
    let mut out: Vec<(u32, f64, f64, f64, Option<f64>)> = Vec::new();
    for row in rows {
        match out.iter_mut().find(|w| w.0 == row.rounds) {
            Some(w) if row.mean_regret > w.2 => {
                *w = (row.rounds, row.lambda_grid, row.mean_regret, row.halfwidth, row.min_gap);
            }
            Some(_) => {}
            None => out.push((row.rounds, row.lambda_grid, row.mean_regret, row.halfwidth, row.min_gap)),
        }
    }
    out
}

/// Monotonicity (up to overlapping halfwidths) and the scaling band of
/// `regret·Δ/(KT)^{1/R}` across the sweep.
pub fn sweep_checks(rows: &[SweepRow], agents: usize, horizon: u64) -> Vec<Check> {
    let worst = worst_per_round(rows);
    let mut sorted = worst.clone();
    sorted.sort_by_key(|w| w.0);
    let mut checks = Vec::new();
    let mut violations = Vec::new();
    for pair in sorted.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.2 - next.3 > prev.2 + prev.3 {
            violations.push(format!("R={} -> R={}", prev.0, next.0));
        }
    }
    let trend: Vec<String> = sorted
        .iter()
        .map(|w| format!("R={}: {:.1}±{:.1}", w.0, w.2, w.3))
        .collect();
    checks.push(Check::new(
        "worst-of-pair regret non-increasing in R",
        violations.is_empty(),
        if violations.is_empty() {
            trend.join(", ")
        } else {
            format!("increase beyond halfwidths at {}", violations.join(", "))
        },
    ));
    let log_kt = (agents as f64 * horizon as f64).log2();
    let (lo, hi) = (1.0 / 8.0, 8.0 * log_kt);
    let mut ratios = Vec::new();
    let mut inside = true;
    for &(rounds, lambda, mean, _, gap) in &sorted {
        let ratio = mean * gap.unwrap_or(0.0) / lambda;
        inside &= (lo..=hi).contains(&ratio);
        ratios.push(format!("R={rounds}: {ratio:.3}"));
    }
    checks.push(Check::new(
        "scaling ratio regret*gap/(KT)^(1/R) within band",
        inside,
        format!("band [{lo}, {hi:.1}]; {}", ratios.join(", ")),
    ));
    checks
}

fn trial_table(cells: &[CellResult]) -> Table {
    let mut table = Table::new(TRIAL_COLUMNS);
    for CellResult { row, records } in cells {
        for r in records {
            let pulls = r.pulls.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
            let eliminated = r
                .elimination_rounds
                .iter()
                .map(|e| e.map_or_else(|| "-".to_owned(), |x| x.to_string()))
                .collect::<Vec<_>>()
                .join(";");
            table.push(vec![
                row.instance.clone(),
                row.rounds.to_string(),
                fmt_f64(row.lambda_grid),
                r.trial.to_string(),
                fmt_f64(r.total_regret),
                r.rounds_used.to_string(),
                r.comm_steps.to_string(),
                r.star_eliminated.to_string(),
                r.e2_holds.to_string(),
                r.deadline_ok.to_string(),
                fmt_flag(r.reduction_exact).to_owned(),
                fmt_flag(r.fact1_ok).to_owned(),
                pulls,
                eliminated,
            ]);
        }
    }
    table
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut table = Table::new(SWEEP_COLUMNS);
    for row in rows {
        table.push(vec![
            row.instance.clone(),
            row.rounds.to_string(),
            fmt_f64(row.lambda_grid),
            fmt_f64(row.mean_regret),
            fmt_f64(row.halfwidth),
            fmt_f64(row.mean_rounds),
            row.max_rounds.to_string(),
            fmt_f64(row.analytic_regret_bound),
            row.analytic_round_bound.to_string(),
            row.star_elim_count.to_string(),
            row.trials.to_string(),
        ]);
    }
    table
}

/// Runs a simulation experiment (every kind except `lb-checks`).
pub fn run_simulation(config: &ExperimentConfig, runner: &Runner) -> Result<(Vec<CellResult>, Report)> {
    let cells = match config.experiment {
        ExperimentKind::Batched => batched_cells(config, runner)?,
        ExperimentKind::CollabReduction => reduction_cells(config, runner)?,
        ExperimentKind::NoCommBaseline => no_comm_cells(config, runner)?,
        ExperimentKind::TradeoffSweep => sweep_cells(config, runner)?,
        ExperimentKind::LbChecks => unreachable!("handled by the lower-bound suite"),
    };
    let budget_mode = config.budget_mode.into();
    let cap_for = |row: &SweepRow| {
        let horizon = match config.experiment {
            ExperimentKind::NoCommBaseline | ExperimentKind::Batched => config.horizon,
            _ => config.agents as u64 * config.horizon,
        };
        BatchConfig::new(row.lambda_grid, horizon)
            .map(|c| batch_grid(&c.with_budget_mode(budget_mode)).len() as u32)
            .unwrap_or(u32::MAX)
    };
    let mut checks = cell_checks(&cells, cap_for);
    let rows: Vec<SweepRow> = cells.iter().map(|c| c.row.clone()).collect();
    if config.experiment == ExperimentKind::TradeoffSweep {
        checks.extend(sweep_checks(&rows, config.agents, config.horizon));
    }
    let report = Report {
        trials: trial_table(&cells),
        aggregate: sweep_table(&rows),
        checks,
        notes: vec![format!(
            "halfwidths: Hoeffding at confidence {} on [0, pulls x max gap] per trial",
            config.confidence
        )],
    };
    Ok((cells, report))
}
