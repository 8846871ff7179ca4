//! K-agent round-structured runs.
//!
//! [`reduce_batched_to_collab`] executes batched successive elimination with
//! a total budget of `K·T`: each batch becomes one round, its pulls are
//! dealt to the agents in contiguous blocks, and every pull of arm `a`
//! reads the shared keyed stream of that arm at its global pull ordinal.
//! The per-arm reward sequences therefore match a single-agent batched run
//! on the same stream exactly.
//!
//! Round boundaries are per-agent time steps. A round lasts as long as its
//! busiest agent, `⌈z/K⌉` steps for a batch of `z` pulls; agents with fewer
//! pulls idle for the rest of the round.

use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::batched::{BatchConfig, BatchRun, SuccessiveElimination};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::math;
use crate::rng::{sample_reward, RngStream};
use crate::transcript::{Entry, Transcript};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollabConfig {
    pub agents: usize,
    /// Per-agent horizon `T`.
    pub horizon: u64,
    /// Optional cap on the number of rounds.
    pub rounds_cap: Option<u32>,
    /// Batched algorithm run by the coordinator; its horizon is `K·T`.
    pub inner: BatchConfig,
}

impl CollabConfig {
    pub fn new(agents: usize, horizon: u64, lambda_grid: f64) -> Result<Self> {
        if agents == 0 {
            return Err(Error::InvalidConfig("at least one agent is required"));
        }
        if horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1"));
        }
        let inner = BatchConfig::new(lambda_grid, agents as u64 * horizon)?;
        Ok(Self {
            agents,
            horizon,
            rounds_cap: None,
            inner,
        })
    }

    pub fn with_rounds_cap(mut self, rounds: u32) -> Self {
        self.rounds_cap = Some(rounds);
        self
    }

    pub fn with_inner(mut self, inner: BatchConfig) -> Self {
        self.inner = inner;
        self
    }

    /// `(KT)^{1/R}`, the grid factor that spreads `K·T` pulls over `R` rounds.
    pub fn lambda_for_rounds(agents: usize, horizon: u64, rounds: u32) -> f64 {
        math::powf(agents as f64 * horizon as f64, 1.0 / f64::from(rounds))
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents == 0 {
            return Err(Error::InvalidConfig("at least one agent is required"));
        }
        if self.rounds_cap == Some(0) {
            return Err(Error::InvalidConfig("rounds cap must be at least 1"));
        }
        self.inner.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollabRun {
    pub agents: usize,
    pub horizon: u64,
    /// Empty when `inner.record_transcript` is off.
    pub per_agent_transcripts: Vec<Transcript>,
    /// `t_1, ..., t_R` in per-agent time steps.
    pub round_ends: Vec<u64>,
    pub comm_steps: usize,
    pub total_regret: f64,
    pub per_agent_regret: Vec<f64>,
    pub pulls_per_arm_total: Vec<u64>,
    /// Coordinator record for the reduction; one run per agent for the
    /// no-communication baseline.
    pub batch_runs: Vec<BatchRun>,
}

impl CollabRun {
    pub fn rounds(&self) -> usize {
        self.round_ends.len()
    }

    /// `t_r` as an exact fraction, with `t_0 = 1/K`.
    pub fn boundary(&self, r: usize) -> (u128, u128) {
        if r == 0 {
            (1, self.agents as u128)
        } else {
            (u128::from(self.round_ends[r - 1]), 1)
        }
    }

    /// `t_r / t_{r−1}` as an exact fraction, `1 <= r <= R`.
    pub fn boundary_ratio(&self, r: usize) -> (u128, u128) {
        let (a, b) = self.boundary(r);
        let (c, d) = self.boundary(r - 1);
        (a * d, b * c)
    }

    /// Exact test of `t_r / t_{r−1} >= (KT)^{1/rounds}`.
    pub fn ratio_reaches(&self, r: usize, rounds: u32) -> bool {
        let (num, den) = self.boundary_ratio(r);
        ratio_at_least_root(num, den, self.agents as u128 * u128::from(self.horizon), rounds)
    }

    /// All agents' entries, agent by agent.
    pub fn merged_transcript(&self) -> Transcript {
        let mut merged = Transcript::with_capacity(self.per_agent_transcripts.iter().map(Transcript::len).sum());
        for t in &self.per_agent_transcripts {
            merged.extend_from(t);
        }
        merged
    }
}

/// Exact test of `(num/den)^rounds >= target`.
pub fn ratio_at_least_root(num: u128, den: u128, target: u128, rounds: u32) -> bool {
    if den == 0 {
        return true;
    }
    let lhs = BigUint::from(num).pow(rounds);
    let rhs = BigUint::from(target) * BigUint::from(den).pow(rounds);
    lhs >= rhs
}

/// Per-agent pull counts for a batch of `z` pulls: `⌊z/K⌋` each, with the
/// remainder going to the lowest-index agents.
pub fn split_batch(z: u64, agents: usize) -> Vec<u64> {
    let k = agents as u64;
    (0..k).map(|i| z / k + u64::from(i < z % k)).collect()
}

/// Runs batched successive elimination with budget `K·T`, distributing each
/// batch over `K` agents. Arm `a` reads `stream.child(a)`.
pub fn reduce_batched_to_collab(instance: &Instance, config: &CollabConfig, stream: &RngStream) -> Result<CollabRun> {
    config.validate()?;
    if instance.is_empty() {
        return Err(Error::EmptyInstance);
    }
    if config.inner.horizon != config.agents as u64 * config.horizon {
        return Err(Error::InvalidConfig("inner horizon must equal agents × horizon"));
    }
    let agents = config.agents;
    let mut schedule = SuccessiveElimination::new(instance.len(), config.inner)?;
    if let Some(cap) = config.rounds_cap {
        if schedule.grid().len() > cap as usize {
            return Err(Error::TooManyRounds {
                rounds: schedule.grid().len(),
                requested: cap as usize,
            });
        }
    }
    let shared: Vec<RngStream> = (0..instance.len()).map(|a| stream.child(a as u64)).collect();
    let record = config.inner.record_transcript;
    let mut transcripts = alloc::vec![Transcript::new(); agents];
    let mut agent_counts = alloc::vec![alloc::vec![0u64; instance.len()]; agents];
    let mut round_ends: Vec<u64> = Vec::new();
    let mut reports: Vec<Vec<f64>> = alloc::vec![Vec::new(); agents];
    let mut rewards = Vec::new();

    while let Some(plan) = schedule.next_plan() {
        let z = plan.total_pulls();
        let shares = split_batch(z, agents);
        let positions: Vec<(usize, u64)> = plan.positions(schedule.counts()).collect();

        let mut start = 0usize;
        for (agent, &share) in shares.iter().enumerate() {
            let block = &positions[start..start + share as usize];
            start += share as usize;
            for &(arm, _) in block {
                agent_counts[agent][arm] += 1;
            }
            let transcript = record.then(|| &mut transcripts[agent]);
            execute_block(
                instance,
                &shared,
                block,
                agent,
                plan.round,
                transcript,
                &mut reports[agent],
            );
        }

        // Reports arrive in agent order, which is plan order.
        rewards.clear();
        for report in reports.iter_mut() {
            rewards.append(report);
        }
        schedule.complete(&rewards);

        let previous = round_ends.last().copied().unwrap_or(0);
        round_ends.push(previous + shares[0]);
    }

    let batch_run = BatchRun::assemble(instance, schedule, None);
    let per_agent_regret = agent_counts.iter().map(|c| instance.regret_from_counts(c)).collect();
    let pulls = batch_run.pulls_per_arm.clone();
    Ok(CollabRun {
        agents,
        horizon: config.horizon,
        per_agent_transcripts: transcripts,
        comm_steps: round_ends.len().saturating_sub(1),
        round_ends,
        total_regret: instance.regret_from_counts(&pulls),
        per_agent_regret,
        pulls_per_arm_total: pulls,
        batch_runs: alloc::vec![batch_run],
    })
}

fn execute_block(
    instance: &Instance,
    shared: &[RngStream],
    block: &[(usize, u64)],
    agent: usize,
    round: u32,
    mut transcript: Option<&mut Transcript>,
    report: &mut Vec<f64>,
) {
    let mut local: Option<(usize, u64, RngStream)> = None;
    for &(arm, ordinal) in block {
        let stream = match &mut local {
            Some((a, next, s)) if *a == arm && *next == ordinal => s,
            _ => {
                let mut s = shared[arm].clone();
                s.seek(ordinal);
                local = Some((arm, ordinal, s));
                &mut local.as_mut().unwrap().2
            }
        };
        let reward = sample_reward(instance.arm(arm), stream);
        if let Some((_, next, _)) = &mut local {
            *next = ordinal + 1;
        }
        report.push(reward);
        if let Some(t) = transcript.as_deref_mut() {
            t.push(Entry {
                arm,
                reward,
                agent,
                round,
            });
        }
    }
}

/// Every agent runs batched successive elimination with horizon `T` on its
/// own stream `stream.child(k)`, with no communication: one round.
pub fn run_no_comm_baseline(instance: &Instance, config: &CollabConfig, stream: &RngStream) -> Result<CollabRun> {
    config.validate()?;
    let inner = config.inner.with_horizon(config.horizon);
    let mut transcripts = Vec::with_capacity(config.agents);
    let mut runs = Vec::with_capacity(config.agents);
    for agent in 0..config.agents {
        let mut run = crate::batched::run_batched_mab(instance, &inner, &stream.child(agent as u64))?;
        // Without communication the whole horizon is a single round.
        let transcript: Transcript = run
            .transcript
            .take()
            .unwrap_or_default()
            .iter()
            .map(|e| Entry { agent, round: 1, ..*e })
            .collect();
        transcripts.push(transcript);
        runs.push(run);
    }
    let mut pulls = alloc::vec![0u64; instance.len()];
    for run in &runs {
        for (total, &n) in pulls.iter_mut().zip(&run.pulls_per_arm) {
            *total += n;
        }
    }
    let per_agent_regret: Vec<f64> = runs.iter().map(|r| r.total_regret).collect();
    Ok(CollabRun {
        agents: config.agents,
        horizon: config.horizon,
        per_agent_transcripts: transcripts,
        round_ends: alloc::vec![config.horizon],
        comm_steps: 0,
        total_regret: per_agent_regret.iter().sum(),
        per_agent_regret,
        pulls_per_arm_total: pulls,
        batch_runs: runs,
    })
}

/// Round with the largest boundary ratio, with the exact Fact-1 check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundRatio {
    /// 1-based round index `r`.
    pub round: usize,
    pub numerator: u128,
    pub denominator: u128,
    pub ratio: f64,
    /// `(KT)^{1/R}`.
    pub threshold: f64,
    /// Exact `ratio >= (KT)^{1/R}`.
    pub meets_threshold: bool,
}

/// First `r` maximizing `t_r / t_{r−1}` (with `t_0 = 1/K`).
pub fn round_ratio_certificate(run: &CollabRun) -> RoundRatio {
    let rounds = run.rounds();
    let mut best = 1usize;
    let (mut bn, mut bd) = run.boundary_ratio(1);
    for r in 2..=rounds {
        let (n, d) = run.boundary_ratio(r);
        // n/d > bn/bd
        if BigUint::from(n) * BigUint::from(bd) > BigUint::from(bn) * BigUint::from(d) {
            best = r;
            bn = n;
            bd = d;
        }
    }
    let kt = run.agents as f64 * run.horizon as f64;
    RoundRatio {
        round: best,
        numerator: bn,
        denominator: bd,
        ratio: bn as f64 / bd as f64,
        threshold: math::powf(kt, 1.0 / rounds as f64),
        meets_threshold: run.ratio_reaches(best, rounds as u32),
    }
}
