use alloc::vec::Vec;

use super::bounds::elimination_deadline;
use super::config::BatchConfig;
use super::schedule::{BatchKind, BatchOutcome, SuccessiveElimination};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::math;
use crate::rng::{sample_reward, RngStream};
use crate::transcript::{Entry, Transcript};

/// State after one batch.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchRecord {
    pub round: u32,
    pub kind: BatchKind,
    pub grid_point: u64,
    /// `I_r`, the arms pulled in this batch.
    pub active: Vec<usize>,
    /// Cumulative pulls of each active arm after the batch.
    pub counts: Vec<u64>,
    /// Cumulative empirical means `μ̂^r_a` of the active arms.
    pub means: Vec<f64>,
    /// Elimination width used, for elimination batches.
    pub threshold: Option<f64>,
}

impl BatchRecord {
    pub fn max_mean(&self) -> f64 {
        self.means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EliminationCertificate {
    pub arm: usize,
    pub round: u32,
    /// `μ̂^r_max − μ̂^r_a` at elimination.
    pub deficit: f64,
    pub threshold: f64,
    /// Analytic deadline `r(a)`, if it falls inside the grid.
    pub deadline: Option<u32>,
}

/// Complete record of one batched run.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchRun {
    pub config: BatchConfig,
    pub grid: Vec<u64>,
    /// `ln(T³N)`.
    pub log_term: f64,
    pub batches: Vec<BatchRecord>,
    pub pulls_per_arm: Vec<u64>,
    pub total_regret: f64,
    pub star_eliminated: bool,
    pub elimination_round: Vec<Option<u32>>,
    pub certificates: Vec<EliminationCertificate>,
    pub transcript: Option<Transcript>,
}

impl BatchRun {
    pub(crate) fn assemble(
        instance: &Instance,
        schedule: SuccessiveElimination,
        transcript: Option<Transcript>,
    ) -> Self {
        let (config, grid, log_term, counts, outcomes) = schedule.into_outcomes();
        let mut elimination_round = alloc::vec![None; instance.len()];
        let mut certificates = Vec::new();
        let mut batches = Vec::with_capacity(outcomes.len());
        for BatchOutcome {
            round,
            kind,
            grid_point,
            active,
            counts,
            means,
            threshold,
            eliminated,
        } in outcomes
        {
            for (arm, deficit) in eliminated {
                elimination_round[arm] = Some(round);
                certificates.push(EliminationCertificate {
                    arm,
                    round,
                    deficit,
                    threshold: threshold.unwrap_or(0.0),
                    deadline: elimination_deadline(&grid, log_term, instance.gap(arm)),
                });
            }
            batches.push(BatchRecord {
                round,
                kind,
                grid_point,
                active,
                counts,
                means,
                threshold,
            });
        }
        Self {
            config,
            total_regret: instance.regret_from_counts(&counts),
            star_eliminated: elimination_round[instance.star()].is_some(),
            pulls_per_arm: counts,
            grid,
            log_term,
            batches,
            elimination_round,
            certificates,
            transcript,
        }
    }

    pub fn rounds_used(&self) -> u32 {
        self.batches.len() as u32
    }

    pub fn total_pulls(&self) -> u64 {
        self.pulls_per_arm.iter().sum()
    }

    pub fn active_sets(&self) -> impl Iterator<Item = &[usize]> {
        self.batches.iter().map(|b| b.active.as_slice())
    }

    /// Per-trial check of the concentration event: every recorded estimate
    /// satisfies `|μ̂ − μ| ≤ sqrt(ln(T³N) / n)` with `n` its pull count.
    pub fn concentration_event_holds(&self, instance: &Instance) -> bool {
        self.batches.iter().all(|b| {
            b.active.iter().zip(&b.counts).zip(&b.means).all(|((&arm, &n), &mean)| {
                n == 0 || math::abs(mean - instance.mean(arm)) <= math::sqrt(self.log_term / n as f64)
            })
        })
    }

    /// `r(a)` for every arm (`None` for the star, zero gaps, or deadlines
    /// beyond the grid).
    pub fn deadlines(&self, instance: &Instance) -> Vec<Option<u32>> {
        (0..instance.len())
            .map(|arm| {
                if arm == instance.star() {
                    None
                } else {
                    elimination_deadline(&self.grid, self.log_term, instance.gap(arm))
                }
            })
            .collect()
    }

    /// No suboptimal arm is active in a batch after its deadline `r(a)`.
    pub fn eliminations_within_deadline(&self, instance: &Instance) -> bool {
        let deadlines = self.deadlines(instance);
        self.batches.iter().all(|b| {
            b.active
                .iter()
                .all(|&arm| deadlines[arm].is_none_or(|deadline| b.round <= deadline))
        })
    }

    /// Active sets are nested and every certificate clears its threshold.
    pub fn is_consistent(&self) -> bool {
        let nested = self
            .batches
            .windows(2)
            .all(|w| w[1].active.iter().all(|a| w[0].active.contains(a)));
        let certified = self.certificates.iter().all(|c| c.deficit >= c.threshold);
        nested && certified
    }
}

/// Runs batched successive elimination on `instance` with one agent.
///
/// Arm `a` draws its rewards from `stream.child(a)`, in pull order; the
/// collaborative reduction relies on this keying to replay the same rewards.
pub fn run_batched_mab(instance: &Instance, config: &BatchConfig, stream: &RngStream) -> Result<BatchRun> {
    if instance.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let mut schedule = SuccessiveElimination::new(instance.len(), *config)?;
    let mut arm_streams: Vec<RngStream> = (0..instance.len()).map(|a| stream.child(a as u64)).collect();
    let mut transcript = config.record_transcript.then(Transcript::new);
    let mut rewards = Vec::new();

    while let Some(plan) = schedule.next_plan() {
        rewards.clear();
        for &(arm, n) in &plan.pulls {
            let source = &mut arm_streams[arm];
            for _ in 0..n {
                let reward = sample_reward(instance.arm(arm), source);
                rewards.push(reward);
                if let Some(t) = transcript.as_mut() {
                    t.push(Entry {
                        arm,
                        reward,
                        agent: 0,
                        round: plan.round,
                    });
                }
            }
        }
        schedule.complete(&rewards);
    }
    Ok(BatchRun::assemble(instance, schedule, transcript))
}
