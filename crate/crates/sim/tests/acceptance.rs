//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use collab_bandit_core::batched::{
    batch_grid, confidence_log_term, elimination_deadline, run_batched_mab, BatchConfig,
};
use collab_bandit_core::collab::{reduce_batched_to_collab, CollabConfig};
use collab_bandit_core::lower_bound::{exhaustive_drift_check, exhaustive_step_check, make_hard_family, Sign};
use collab_bandit_core::{RngStream, Transcript};
use collab_bandit_sim::experiment::{run_simulation, sweep_checks, worst_per_round, CellResult};
use collab_bandit_sim::lb_suite::run_lb_checks;
use collab_bandit_sim::{run_to_dir, ExperimentConfig, Runner};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(text).expect("valid acceptance config")
}

fn batched_half_gap(trials: u64, seed: u64) -> CellResult {
    let cfg = config(&format!(
        "experiment = \"batched\"\nseed = {seed}\ntrials = {trials}\nconfidence = 0.99\nhorizon = 100000\nlambda_grid = 2.0\n[instance]\nlevel = 1\nsign = \"plus\"\n"
    ));
    let runner = Runner::new(0).unwrap();
    let (mut cells, _) = run_simulation(&cfg, &runner).unwrap();
    cells.remove(0)
}

fn regret_bound() -> Outcome {
    let cell = batched_half_gap(1000, 101);
    let row = &cell.row;
    let bound = row.analytic_regret_bound;
    outcome(
        row.mean_regret + row.halfwidth <= bound && (bound - 9764.9).abs() < 0.1,
        format!(
            "mean regret {:.2} + 99% halfwidth {:.2} = {:.2} <= bound {:.2} over {} trials",
            row.mean_regret,
            row.halfwidth,
            row.mean_regret + row.halfwidth,
            bound,
            row.trials
        ),
    )
}

fn round_bound_and_elimination(cell: &CellResult) -> (Outcome, Outcome) {
    let row = &cell.row;
    let e2: Vec<_> = cell.records.iter().filter(|r| r.e2_holds).collect();
    let max_e2_rounds = e2.iter().map(|r| r.rounds_used).max().unwrap_or(0);
    let max_rounds = cell.records.iter().map(|r| r.rounds_used).max().unwrap_or(0);
    let star = row.star_elim_count;
    let round_ok = row.analytic_round_bound == 15 && max_e2_rounds <= 15 && max_rounds <= 17 && star == 0;
    let round = outcome(
        round_ok,
        format!(
            "max rounds {max_e2_rounds} over {} E2 trials (bound {}), {max_rounds} over all {} (cap 17), star eliminated {star} times",
            e2.len(),
            row.analytic_round_bound,
            cell.records.len()
        ),
    );

    let grid = batch_grid(&BatchConfig::new(2.0, 100_000).unwrap());
    let deadline = elimination_deadline(&grid, confidence_log_term(100_000, 2), 0.5).unwrap();
    let late = e2
        .iter()
        .filter(|r| r.elimination_rounds[1].is_none_or(|round| round > deadline) || !r.deadline_ok)
        .count();
    let latest = e2.iter().filter_map(|r| r.elimination_rounds[1]).max().unwrap_or(0);
    let elimination = outcome(
        deadline == 14 && late == 0,
        format!(
            "latest elimination round {latest} vs r(a) = {deadline}; {late} of {} E2 trials late",
            e2.len()
        ),
    );
    (round, elimination)
}

/// Rewards of each arm in pull order.
fn per_arm_rewards(transcripts: &[&Transcript], arms: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new(); arms];
    for t in transcripts {
        for e in t.iter() {
            out[e.arm].push(e.reward.to_bits());
        }
    }
    out
}

fn reduction_exactness() -> Outcome {
    let instance = collab_bandit_core::lower_bound::hard_input(2, Sign::Plus, 4.0).unwrap();
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for agents in [1usize, 2, 4] {
        for horizon in [1000u64, 4096, 1 << 14] {
            for lambda in [2.0, 3.0] {
                for seed in 0..5u64 {
                    cases += 1;
                    let cfg = CollabConfig::new(agents, horizon, lambda).unwrap();
                    let stream = RngStream::keyed(seed, vec![0]).child(0);
                    let collab = reduce_batched_to_collab(&instance, &cfg, &stream).unwrap();
                    let batched = run_batched_mab(&instance, &cfg.inner, &stream).unwrap();
                    let agents_t: Vec<&Transcript> = collab.per_agent_transcripts.iter().collect();
                    // Agents split each batch in plan order, so per-arm reward
                    // sequences interleave by round.
                    let mut collab_rewards = vec![Vec::new(); 2];
                    for round in 1..=collab.rounds() as u32 {
                        for t in &agents_t {
                            for e in t.iter().filter(|e| e.round == round) {
                                collab_rewards[e.arm].push(e.reward.to_bits());
                            }
                        }
                    }
                    let batched_rewards = per_arm_rewards(&[batched.transcript.as_ref().unwrap()], 2);
                    let exact = collab.pulls_per_arm_total == batched.pulls_per_arm
                        && collab.total_regret.to_bits() == batched.total_regret.to_bits()
                        && collab_rewards == batched_rewards;
                    if !exact {
                        mismatches.push(format!("K={agents} T={horizon} lambda={lambda} seed={seed}"));
                    }
                }
            }
        }
    }
    outcome(
        mismatches.is_empty() && cases == 90,
        if mismatches.is_empty() {
            format!("{cases} (K, T, lambda, seed) cases: pull counts, regret and per-arm rewards bit-identical")
        } else {
            format!("mismatch at {}", mismatches.join(", "))
        },
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn exhaustive_steps() -> Outcome {
    let family = make_hard_family(4, 1 << 22, 4.0, 0.1, 1e-6).unwrap();
    let (report, elapsed) = timed(|| exhaustive_step_check(&family, 6, 5.0));
    outcome(
        report.passed() && report.levels_checked == 6 && elapsed < Duration::from_secs(1),
        format!(
            "{} cells over levels 1..=6, worst |step|/(5/beta^l) = {:.6}, {:?}",
            report.cells_checked, report.worst_ratio, elapsed
        ),
    )
}

fn exhaustive_drift() -> Outcome {
    let family = make_hard_family(4, 1 << 22, 4.0, 0.1, 1e-6).unwrap();
    let (report, elapsed) = timed(|| exhaustive_drift_check(&family, 6, 11.0));
    outcome(
        report.passed() && report.levels_checked == 6 && elapsed < Duration::from_secs(1),
        format!(
            "{} cells over levels 1..=6, worst drift/(11/beta^(2l)) = {:.6}, {:?}",
            report.cells_checked, report.worst_ratio, elapsed
        ),
    )
}

fn lower_bound_suite() -> (Outcome, Outcome) {
    let cfg = config(
        "experiment = \"lb-checks\"\nseed = 303\ntrials = 1\nagents = 4\nhorizon = 16384\n[lb]\nscaled_lambda_lb = 0.1\npartition_runs = 1000\nmc_trials = 100000\n",
    );
    let report = run_lb_checks(&cfg, &Runner::new(0).unwrap()).unwrap();
    let find = |prefix: &'static str| report.checks.iter().filter(move |c| c.name.starts_with(prefix));
    let fact1: Vec<_> = find("round partition").chain(find("round ratio certificate")).collect();
    let partition = outcome(
        fact1.len() == 2 && fact1.iter().all(|c| c.passed),
        fact1.iter().map(|c| c.detail.clone()).collect::<Vec<_>>().join("; "),
    );
    let events: Vec<_> = find("event E").collect();
    let event_e = outcome(
        !events.is_empty() && events.iter().all(|c| c.passed),
        events
            .iter()
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; "),
    );
    (partition, event_e)
}

fn tradeoff_sweep() -> Outcome {
    let cfg = config(
        "experiment = \"tradeoff-sweep\"\nseed = 404\ntrials = 500\nconfidence = 0.99\nagents = 4\nhorizon = 65536\nrounds = [2, 3, 4, 6, 8]\n[instance]\nlevel = 1\nsign = \"pair\"\n",
    );
    let ((cells, _), elapsed) = timed(|| run_simulation(&cfg, &Runner::new(0).unwrap()).unwrap());
    let rows: Vec<_> = cells.iter().map(|c| c.row.clone()).collect();
    let checks = sweep_checks(&rows, 4, 65536);
    let worst = worst_per_round(&rows);
    let passed = checks.iter().all(|c| c.passed) && worst.len() == 5 && elapsed < Duration::from_secs(300);
    outcome(
        passed,
        format!("{}; {} ({:.1?})", checks[0].detail, checks[1].detail, elapsed),
    )
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    ["trials.csv", "aggregate.csv"]
        .iter()
        .map(|f| (f.to_string(), fs::read(dir.join(f)).unwrap()))
        .collect()
}

fn determinism() -> Outcome {
    let configs = [
        "experiment = \"batched\"\nseed = 5\ntrials = 40\nhorizon = 5000\nlambda_grid = 2.0\n[instance]\nmeans = [0.6, 0.5, 0.45]\n",
        "experiment = \"collab-reduction\"\nseed = 6\ntrials = 20\nagents = 3\nhorizon = 2000\nlambda_grid = 2.5\n[instance]\nlevel = 2\nsign = \"minus\"\n",
        "experiment = \"no-comm-baseline\"\nseed = 7\ntrials = 20\nagents = 4\nhorizon = 3000\nlambda_grid = 2.0\n[instance]\nlevel = 1\n",
        "experiment = \"tradeoff-sweep\"\nseed = 8\ntrials = 10\nagents = 2\nhorizon = 4096\nrounds = [2, 4]\n[instance]\nlevel = 1\nsign = \"pair\"\n",
        "experiment = \"lb-checks\"\nseed = 9\ntrials = 1\nagents = 2\nhorizon = 4096\n[lb]\npartition_runs = 40\nmc_trials = 2000\n",
    ];
    let root = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    for (i, text) in configs.iter().enumerate() {
        let cfg = config(text);
        let mut seen: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
        for (run, threads) in [(0, 1), (1, 8), (2, 1), (3, 8)] {
            let dir = root.path().join(format!("{i}-{run}"));
            run_to_dir(&cfg, threads, &dir).unwrap();
            seen.push(outputs(&dir));
        }
        if seen.iter().any(|s| s != &seen[0]) || seen[0].iter().any(|(_, b)| b.is_empty()) {
            differing.push(cfg.experiment.to_string());
        }
    }
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            "trials.csv and aggregate.csv byte-identical across two runs each at 1 and 8 threads for all five experiment kinds".to_owned()
        } else {
            format!("outputs differ for {}", differing.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, o: Outcome| {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} criterion {n:>2} ({name}): {}", o.detail);
        results.push((n, name, o));
    };

    report(1, "regret bound", regret_bound());
    let star_trials = batched_half_gap(10_000, 202);
    let (rounds, elimination) = round_bound_and_elimination(&star_trials);
    report(2, "round bound and star survival", rounds);
    report(3, "elimination deadline", elimination);
    report(4, "reduction exactness", reduction_exactness());
    report(5, "exhaustive per-step bound", exhaustive_steps());
    report(6, "exhaustive drift bound", exhaustive_drift());
    let (partition, event_e) = lower_bound_suite();
    report(7, "round ratio and partition", partition);
    report(8, "round/regret tradeoff", tradeoff_sweep());
    report(9, "event E Monte Carlo", event_e);
    report(10, "determinism", determinism());

    let failed = results.iter().filter(|r| !r.2.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
