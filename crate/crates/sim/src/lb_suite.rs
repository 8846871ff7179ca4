//! Numerical checks of the lower-bound constructions.

use anyhow::Result;
use collab_bandit_core::collab::{reduce_batched_to_collab, round_ratio_certificate, CollabConfig};
use collab_bandit_core::lower_bound::{
    azuma_tail_bound, event_e_check, exhaustive_drift_check, exhaustive_step_check, make_hard_family,
    project_transcript, round_index_report, tau, HardFamily, Sign,
};
use collab_bandit_core::{sample_reward, RngStream, Transcript};

use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, fmt_flag, Check, Report, Table};
use crate::runner::{trial_stream, Runner};

pub const RUN_COLUMNS: &[&str] = &[
    "run",
    "instance",
    "R",
    "rounds_used",
    "r_of_gamma",
    "partition_count",
    "ratio_num",
    "ratio_den",
    "fact1_ok",
    "ell_of_gamma",
    "clamped",
    "tau",
    "zeta",
    "m_r",
    "projections",
    "budget_ok",
    "window_budget_ok",
];

pub const CHECK_COLUMNS: &[&str] = &["check", "level", "value", "bound", "passed", "witness"];

/// Path prefix that keeps Monte Carlo streams apart from trial streams.
const EVENT_E_STREAM: u64 = 0x4556_454e_545f_4500;

/// Family with at least `levels` levels; the members of each `𝓘_ℓ` do not
/// depend on `T` beyond the level count.
fn family_with_levels(config: &ExperimentConfig, levels: u32) -> Result<HardFamily> {
    let lb = &config.lb;
    let k = config.agents as u64;
    let needed = (1u64 << (4 * levels.min(15))).div_ceil(4 * k);
    Ok(make_hard_family(
        config.agents,
        config.horizon.max(needed),
        lb.beta,
        lb.eps,
        lb.lambda_lb,
    )?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub run: u64,
    pub instance: String,
    pub rounds: u32,
    pub rounds_used: usize,
    pub r_of_gamma: Option<usize>,
    pub partition_count: usize,
    pub ratio: (u128, u128),
    pub fact1_ok: bool,
    pub ell_of_gamma: u32,
    pub clamped: bool,
    pub tau: Option<usize>,
    pub zeta: f64,
    pub m_r: f64,
    pub projections: usize,
    pub budget_ok: bool,
    /// `|Proj_k| <= β^{2ℓ}/α + ζ_ℓ` at `ℓ = ℓ(γ)`; `None` when the report is
    /// clamped or `R` is outside the valid range.
    pub window_budget_ok: Option<bool>,
}

fn partition_run(config: &ExperimentConfig, family: &HardFamily, run_index: u64) -> Result<RunRow> {
    let inputs = family.inputs();
    let input_index = (run_index % inputs.len() as u64) as usize;
    let (ell, sign) = family.label(input_index);
    let target = 1 + (run_index % 8) as u32;
    let lambda = CollabConfig::lambda_for_rounds(config.agents, config.horizon, target).max(2.0);
    let collab = CollabConfig::new(config.agents, config.horizon, lambda)?;
    let run = reduce_batched_to_collab(&inputs[input_index], &collab, &trial_stream(config.seed, run_index))?;
    let rounds = target.max(run.rounds() as u32);
    let report = round_index_report(&run, family, rounds)?;
    let cert = round_ratio_certificate(&run);

    let mut projections = 0;
    let mut budget_ok = true;
    for level in 1..=family.levels {
        if tau(&run, family, level).is_none() {
            continue;
        }
        for k in 0..run.agents {
            let p = project_transcript(&run, k, level, family, rounds)?;
            projections += 1;
            budget_ok &= p.budget_ok;
        }
    }
    let window_budget_ok = if report.clamped || !report.r_range || report.tau.is_none() {
        None
    } else {
        let level = report.ell_of_gamma;
        let cap = family.beta_pow(2.0 * level as f64) / family.alpha + report.zeta;
        let mut ok = true;
        for k in 0..run.agents {
            let p = project_transcript(&run, k, level, family, rounds)?;
            ok &= p.proj.len() as f64 <= cap;
        }
        Some(ok)
    };
    Ok(RunRow {
        run: run_index,
        instance: format!("I{ell}{}", sign.symbol()),
        rounds,
        rounds_used: run.rounds(),
        r_of_gamma: report.r_of_gamma,
        partition_count: report.partition_count,
        ratio: (cert.numerator, cert.denominator),
        fact1_ok: cert.meets_threshold && run.ratio_reaches(cert.round, rounds),
        ell_of_gamma: report.ell_of_gamma,
        clamped: report.clamped,
        tau: report.tau,
        zeta: report.zeta,
        m_r: report.m_r,
        projections,
        budget_ok,
        window_budget_ok,
    })
}

fn uniform_play(instance: &collab_bandit_core::Instance, n: usize, stream: &mut RngStream) -> Transcript {
    let mut t = Transcript::with_capacity(n);
    for _ in 0..n {
        let arm = stream.next_index(2);
        t.push(collab_bandit_core::Entry::new(
            arm,
            sample_reward(instance.arm(arm), stream),
        ));
    }
    t
}

/// Event-`E` failure rate of uniform play, per qualifying level.
#[derive(Clone, Debug, PartialEq)]
pub struct EventEResult {
    pub ell: u32,
    pub length: u64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub azuma: f64,
    pub sd: f64,
    pub passed: bool,
}

pub fn event_e_monte_carlo(config: &ExperimentConfig, family: &HardFamily, runner: &Runner) -> Vec<EventEResult> {
    let mut out = Vec::new();
    if family.levels <= 1 {
        return out;
    }
    let instance = family.input(family.levels, Sign::Plus);
    for ell in 1..=family.levels {
        let Some(length) = family.max_qualifying_length(ell) else {
            continue;
        };
        if length == 0 || length > config.lb.mc_max_length {
            continue;
        }
        let trials = config.lb.mc_trials;
        let outcomes = runner.map(trials, |trial| {
            let mut stream = RngStream::keyed(config.seed, vec![EVENT_E_STREAM, u64::from(ell), trial]);
            let t = uniform_play(instance, length as usize, &mut stream);
            event_e_check(family, &t).expect("binary rewards").holds
        });
        let failures = outcomes.iter().filter(|&&holds| !holds).count() as u64;
        let rate = failures as f64 / trials as f64;
        let sd = (rate * (1.0 - rate) / trials as f64).sqrt();
        let azuma = azuma_tail_bound(family, length as usize);
        out.push(EventEResult {
            ell,
            length,
            trials,
            failures,
            rate,
            azuma,
            sd,
            passed: rate <= azuma + 3.0 * sd,
        });
    }
    out
}

fn check_row(table: &mut Table, check: &str, level: Option<u32>, value: f64, bound: f64, passed: bool, witness: &str) {
    table.push(vec![
        check.to_owned(),
        level.map(|l| l.to_string()).unwrap_or_default(),
        fmt_f64(value),
        fmt_f64(bound),
        passed.to_string(),
        witness.to_owned(),
    ]);
}

/// Exhaustive per-step and drift bounds, round partition and projection
/// budgets over simulated runs, and the event-`E` Monte Carlo.
pub fn run_lb_checks(config: &ExperimentConfig, runner: &Runner) -> Result<Report> {
    let lb = &config.lb;
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let mut table = Table::new(CHECK_COLUMNS);

    let exhaustive = family_with_levels(config, lb.max_level)?;
    let steps = exhaustive_step_check(&exhaustive, lb.max_level, lb.step_numerator);
    let witness = steps.violation.map(|v| {
        let (la, sa) = exhaustive.label(v.a);
        let (lb_, sb) = exhaustive.label(v.b);
        format!(
            "ell={} A=I{la}{} B=I{lb_}{} arm={} outcome={} value={:.6} bound={:.6}",
            v.ell,
            sa.symbol(),
            sb.symbol(),
            v.arm + 1,
            v.outcome,
            v.value,
            v.bound
        )
    });
    checks.push(Check::new(
        "per-step log-ratio bound",
        steps.passed(),
        match &witness {
            Some(w) => format!("violated: {w}"),
            None => format!(
                "{} cells over levels 1..={}, worst |step|/bound {:.6}",
                steps.cells_checked, steps.levels_checked, steps.worst_ratio
            ),
        },
    ));
    check_row(
        &mut table,
        "per-step",
        None,
        steps.worst_ratio,
        1.0,
        steps.passed(),
        witness.as_deref().unwrap_or(""),
    );

    let drift = exhaustive_drift_check(&exhaustive, lb.max_level, lb.drift_numerator);
    let witness = drift.violation.map(|v| {
        format!(
            "ell={} a={} b={} i={} arm={} drift={:.6}",
            v.ell,
            v.a,
            v.b,
            v.i,
            v.arm + 1,
            v.drift
        )
    });
    checks.push(Check::new(
        "drift bound",
        drift.passed(),
        match &witness {
            Some(w) => format!("violated: {w}"),
            None => format!(
                "{} cells over levels 1..={}, worst drift/bound {:.6}",
                drift.cells_checked, drift.levels_checked, drift.worst_ratio
            ),
        },
    ));
    check_row(
        &mut table,
        "drift",
        None,
        drift.worst_ratio,
        1.0,
        drift.passed(),
        witness.as_deref().unwrap_or(""),
    );

    let scaled = make_hard_family(config.agents, config.horizon, lb.beta, lb.eps, lb.scaled_lambda_lb)?;
    notes.push(format!(
        "family: K={} T={} L={} beta={} eps={}; exhaustive checks on L={}; partition, projection and event-E checks use lambda_lb={}",
        config.agents, config.horizon, scaled.levels, lb.beta, lb.eps, exhaustive.levels, lb.scaled_lambda_lb
    ));

    let rows: Vec<RunRow> = runner
        .map(lb.partition_runs, |i| partition_run(config, &scaled, i))
        .into_iter()
        .collect::<Result<_>>()?;
    let bad_partition = rows.iter().filter(|r| r.partition_count != 1).count();
    let bad_fact1 = rows.iter().filter(|r| !r.fact1_ok).count();
    let bad_budget = rows.iter().filter(|r| !r.budget_ok).count();
    let window_checked = rows.iter().filter(|r| r.window_budget_ok.is_some()).count();
    let bad_window = rows.iter().filter(|r| r.window_budget_ok == Some(false)).count();
    let clamped = rows.iter().filter(|r| r.clamped).count();
    checks.push(Check::new(
        "round partition",
        bad_partition == 0,
        format!("{bad_partition} of {} runs without exactly one F_r", rows.len()),
    ));
    checks.push(Check::new(
        "round ratio certificate",
        bad_fact1 == 0,
        format!("{bad_fact1} of {} runs below (KT)^(1/R)", rows.len()),
    ));
    checks.push(Check::new(
        "projection budget",
        bad_budget == 0,
        format!(
            "{} projections, {bad_budget} runs over K*t_(tau-1) + zeta; window form checked on {window_checked} runs, {bad_window} over, {} skipped ({clamped} clamped)",
            rows.iter().map(|r| r.projections).sum::<usize>(),
            rows.len() - window_checked
        ),
    ));
    if bad_window > 0 {
        checks.push(Check::new(
            "projection window budget",
            false,
            format!("{bad_window} runs over beta^(2l)/alpha + zeta"),
        ));
    }
    for (name, bad) in [
        ("partition", bad_partition),
        ("fact1", bad_fact1),
        ("projection-budget", bad_budget),
    ] {
        check_row(&mut table, name, None, bad as f64, 0.0, bad == 0, "");
    }

    if scaled.levels <= 1 {
        let degenerate = event_e_check(&scaled, &Transcript::new())?;
        checks.push(Check::new(
            "event E",
            degenerate.holds && degenerate.degenerate,
            "degenerate family (L <= 1): no level qualifies",
        ));
    }
    for result in event_e_monte_carlo(config, &scaled, runner) {
        checks.push(Check::new(
            format!("event E failure rate [level {}]", result.ell),
            result.passed,
            format!(
                "n={} rate {}/{} = {:.6} vs Azuma sum {:.6} + 3sd {:.6}",
                result.length,
                result.failures,
                result.trials,
                result.rate,
                result.azuma,
                3.0 * result.sd
            ),
        ));
        check_row(
            &mut table,
            "event-e",
            Some(result.ell),
            result.rate,
            result.azuma + 3.0 * result.sd,
            result.passed,
            "",
        );
    }

    let mut runs = Table::new(RUN_COLUMNS);
    for r in &rows {
        runs.push(vec![
            r.run.to_string(),
            r.instance.clone(),
            r.rounds.to_string(),
            r.rounds_used.to_string(),
            r.r_of_gamma.map(|x| x.to_string()).unwrap_or_default(),
            r.partition_count.to_string(),
            r.ratio.0.to_string(),
            r.ratio.1.to_string(),
            r.fact1_ok.to_string(),
            r.ell_of_gamma.to_string(),
            r.clamped.to_string(),
            r.tau.map(|x| x.to_string()).unwrap_or_default(),
            fmt_f64(r.zeta),
            fmt_f64(r.m_r),
            r.projections.to_string(),
            r.budget_ok.to_string(),
            fmt_flag(r.window_budget_ok).to_owned(),
        ]);
    }
    Ok(Report {
        trials: runs,
        aggregate: table,
        checks,
        notes,
    })
}
