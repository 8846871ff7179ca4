use collab_bandit_core::collab::{reduce_batched_to_collab, round_ratio_certificate, CollabConfig};
use collab_bandit_core::lower_bound::{
    azuma_tail_bound, event_e_check, exhaustive_drift_check, exhaustive_step_check, llr_trace, make_hard_family,
    paired_regret_lower, project_transcript, round_index_report, tau, transcript_likelihood, HardFamily, Sign,
    SCALED_LAMBDA_LB,
};
use collab_bandit_core::{sample_reward, Instance, RngStream, Transcript};

fn uniform_play(instance: &Instance, n: usize, rng: &mut RngStream) -> Transcript {
    let pairs: Vec<(usize, f64)> = (0..n)
        .map(|_| {
            let arm = rng.next_index(2);
            (arm, sample_reward(instance.arm(arm), rng))
        })
        .collect();
    Transcript::from_pairs(&pairs)
}

#[test]
fn exhaustive_bounds_up_to_six_levels() {
    let family = make_hard_family(4, 1 << 22, 4.0, 0.1, 1e-6).unwrap();
    assert_eq!(family.levels, 6);
    let steps = exhaustive_step_check(&family, 6, 5.0);
    assert!(steps.passed(), "{:?}", steps.violation);
    assert_eq!(steps.levels_checked, 6);
    let drift = exhaustive_drift_check(&family, 6, 11.0);
    assert!(drift.passed(), "{:?}", drift.violation);
}

#[test]
fn log_space_likelihood_is_consistent() {
    let family = make_hard_family(4, 1 << 14, 4.0, 0.1, 1e-6).unwrap();
    let a = family.input(3, Sign::Plus);
    let b = family.input(4, Sign::Minus);
    let mut rng = RngStream::new(8);
    let t = uniform_play(a, 10_000, &mut rng);
    let trace = llr_trace(a, b, &t, 3, 4.0).unwrap();
    let direct = transcript_likelihood(a, &t).unwrap().log - transcript_likelihood(b, &t).unwrap().log;
    assert!((trace.final_log_ratio() - direct).abs() <= 1e-9 * direct.abs().max(1.0));
    assert!(trace.step_bound_holds());
    assert_eq!(trace.log_ratio.len(), t.len() + 1);
}

/// `Pr_A[G ∧ E] <= e^{2ε}·Pr_B[G ∧ E]` up to Monte Carlo error, for a fixed
/// test event `G` on short transcripts.
#[test]
fn short_transcripts_are_indistinguishable() {
    let family = make_hard_family(4, 1 << 14, 4.0, 0.1, SCALED_LAMBDA_LB).unwrap();
    let ell = 2;
    let n = family.max_qualifying_length(ell).unwrap() as usize;
    assert!(n >= 10);
    let trials = 100_000;
    let frequency = |instance: &Instance, seed: u64| {
        let mut rng = RngStream::new(seed);
        let mut hits = 0u32;
        for _ in 0..trials {
            let t = uniform_play(instance, n, &mut rng);
            let successes = t.iter().filter(|e| e.arm == 0 && e.reward == 1.0).count();
            let in_e = event_e_check(&family, &t).unwrap().holds;
            if successes > n / 4 && in_e {
                hits += 1;
            }
        }
        hits as f64 / trials as f64
    };
    let pa = frequency(family.input(ell, Sign::Plus), 1);
    let pb = frequency(family.input(ell, Sign::Minus), 2);
    let slack = 3.0 * ((pa * (1.0 - pa) + pb * (1.0 - pb)) / trials as f64).sqrt();
    assert!(pa <= (2.0 * family.eps).exp() * pb + slack, "pa {pa}, pb {pb}");
    assert!(pb <= (2.0 * family.eps).exp() * pa + slack, "pa {pa}, pb {pb}");
}

#[test]
fn event_e_failures_stay_under_azuma_sum() {
    let family = make_hard_family(4, 1 << 14, 4.0, 0.1, SCALED_LAMBDA_LB).unwrap();
    let instance = family.input(family.levels, Sign::Plus);
    let mut rng = RngStream::new(17);
    for ell in 2..=3 {
        let n = family.max_qualifying_length(ell).unwrap() as usize;
        let trials = 20_000;
        let failures = (0..trials)
            .filter(|_| {
                !event_e_check(&family, &uniform_play(instance, n, &mut rng))
                    .unwrap()
                    .holds
            })
            .count();
        let rate = failures as f64 / trials as f64;
        let sd = (rate * (1.0 - rate) / trials as f64).sqrt();
        assert!(rate <= azuma_tail_bound(&family, n) + 3.0 * sd, "ell {ell}: {rate}");
    }
}

fn reduction_runs(family: &HardFamily, rounds: u32, count: u64) -> Vec<collab_bandit_core::collab::CollabRun> {
    let (agents, horizon) = (family.agents, family.horizon);
    let lambda = CollabConfig::lambda_for_rounds(agents, horizon, rounds).max(2.0);
    let config = CollabConfig::new(agents, horizon, lambda).unwrap();
    let instance = family.input(1, Sign::Plus);
    (0..count)
        .map(|trial| reduce_batched_to_collab(instance, &config, &RngStream::keyed(5, vec![trial]).child(0)).unwrap())
        .collect()
}

#[test]
fn exactly_one_round_carries_the_ratio() {
    let family = make_hard_family(4, 1 << 12, 4.0, 0.1, SCALED_LAMBDA_LB).unwrap();
    for rounds in [1u32, 2, 3, 5, 8] {
        for run in reduction_runs(&family, rounds, 20) {
            let r = rounds.max(run.rounds() as u32);
            let report = round_index_report(&run, &family, r).unwrap();
            assert_eq!(report.partition_count, 1);
            let cert = round_ratio_certificate(&run);
            assert!(cert.meets_threshold);
            if !report.clamped {
                assert!(report.window_holds);
                assert_eq!(report.tau, report.r_of_gamma);
            }
        }
    }
}

#[test]
fn projections_of_simulated_runs() {
    let family = make_hard_family(4, 1 << 12, 4.0, 0.1, SCALED_LAMBDA_LB).unwrap();
    for run in reduction_runs(&family, 3, 10) {
        let rounds = run.rounds() as u32;
        for ell in 1..=family.levels {
            if tau(&run, &family, ell).is_none() {
                continue;
            }
            let mut lasts = Vec::new();
            for k in 0..run.agents {
                let p = project_transcript(&run, k, ell, &family, rounds).unwrap();
                assert!(p.budget_ok);
                assert!(p.last.iter().all(|e| e.agent == k && e.round == p.tau as u32));
                assert!(p.proj.iter().rev().take(p.last.len()).all(|e| e.agent == k));
                lasts.push(p.last);
            }
            let z = project_transcript(&run, 0, ell, &family, rounds).unwrap().zeta_len;
            let paired = paired_regret_lower(&lasts, &family, ell, z).unwrap();
            assert!(paired.holds);
        }
    }
}
