use alloc::vec::Vec;

use super::bounds::confidence_log_term;
use super::config::{batch_grid, BatchConfig, BudgetMode};
use crate::error::{Error, Result};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BatchKind {
    /// Full grid batch followed by an elimination step.
    Elimination,
    /// Grid batch cut short by the global budget; ends the run.
    Truncated,
    /// Remaining budget assigned to the single surviving arm; ends the run.
    Remainder,
}

/// Pulls to make in one batch, arms in increasing index order.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchPlan {
    /// 1-based batch number.
    pub round: u32,
    pub kind: BatchKind,
    /// Cumulative per-arm target `T_r` for grid batches.
    pub grid_point: u64,
    pub pulls: Vec<(usize, u64)>,
}

impl BatchPlan {
    pub fn total_pulls(&self) -> u64 {
        self.pulls.iter().map(|&(_, n)| n).sum()
    }

    /// `(arm, pull ordinal of that arm)` for each position of the batch,
    /// given the per-arm counts before the batch.
    pub fn positions<'a>(&'a self, counts_before: &'a [u64]) -> impl Iterator<Item = (usize, u64)> + 'a {
        self.pulls
            .iter()
            .flat_map(move |&(arm, n)| (0..n).map(move |i| (arm, counts_before[arm] + i)))
    }
}

/// Elimination outcome recorded after a batch.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct BatchOutcome {
    pub round: u32,
    pub kind: BatchKind,
    pub grid_point: u64,
    pub active: Vec<usize>,
    pub counts: Vec<u64>,
    pub means: Vec<f64>,
    pub threshold: Option<f64>,
    pub eliminated: Vec<(usize, f64)>,
}

/// The decision side of batched successive elimination.
///
/// Call [`next_plan`](Self::next_plan), feed every reward of the plan (in
/// plan order) to [`complete`](Self::complete), and repeat until `next_plan`
/// returns `None`.
#[derive(Clone, Debug)]
pub struct SuccessiveElimination {
    config: BatchConfig,
    grid: Vec<u64>,
    log_term: f64,
    active: Vec<usize>,
    sums: Vec<f64>,
    counts: Vec<u64>,
    used: u64,
    next_grid: usize,
    pending: Option<BatchPlan>,
    finished: bool,
    outcomes: Vec<BatchOutcome>,
}

impl SuccessiveElimination {
    pub fn new(arms: usize, config: BatchConfig) -> Result<Self> {
        if arms == 0 {
            return Err(Error::EmptyInstance);
        }
        config.validate()?;
        Ok(Self {
            config,
            grid: batch_grid(&config),
            log_term: confidence_log_term(config.horizon, arms),
            active: (0..arms).collect(),
            sums: alloc::vec![0.0; arms],
            counts: alloc::vec![0; arms],
            used: 0,
            next_grid: 0,
            pending: None,
            finished: false,
            outcomes: Vec::new(),
        })
    }

    pub fn config(&self) -> &BatchConfig {
        &self.config
    }

    pub fn grid(&self) -> &[u64] {
        &self.grid
    }

    /// `ln(T³N)`.
    pub fn log_term(&self) -> f64 {
        self.log_term
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn pulls_used(&self) -> u64 {
        self.used
    }

    /// `2·sqrt(ln(T³N) / T_r)`.
    pub fn threshold(&self, grid_point: u64) -> f64 {
        2.0 * math::sqrt(self.log_term / grid_point as f64)
    }

    pub fn next_plan(&mut self) -> Option<BatchPlan> {
        if let Some(plan) = &self.pending {
            return Some(plan.clone());
        }
        if self.finished {
            return None;
        }
        let round = self.outcomes.len() as u32 + 1;
        let horizon = self.config.horizon;

        if self.active.len() == 1 {
            let rest = horizon.saturating_sub(self.used);
            if rest == 0 {
                self.finished = true;
                return None;
            }
            let arm = self.active[0];
            let plan = BatchPlan {
                round,
                kind: BatchKind::Remainder,
                grid_point: self.counts[arm] + rest,
                pulls: alloc::vec![(arm, rest)],
            };
            self.pending = Some(plan.clone());
            return Some(plan);
        }

        let Some(&grid_point) = self.grid.get(self.next_grid) else {
            self.finished = true;
            return None;
        };
        let previous = if self.next_grid == 0 {
            0
        } else {
            self.grid[self.next_grid - 1]
        };
        let per_arm = grid_point - previous;
        let wanted = per_arm * self.active.len() as u64;

        let plan = if self.config.budget_mode == BudgetMode::GlobalCap && self.used + wanted > horizon {
            let left = horizon - self.used;
            if left == 0 {
                self.finished = true;
                return None;
            }
            let n = self.active.len() as u64;
            let (base, extra) = (left / n, left % n);
            let pulls = self
                .active
                .iter()
                .enumerate()
                .map(|(i, &arm)| (arm, base + u64::from((i as u64) < extra)))
                .filter(|&(_, p)| p > 0)
                .collect();
            BatchPlan {
                round,
                kind: BatchKind::Truncated,
                grid_point,
                pulls,
            }
        } else {
            BatchPlan {
                round,
                kind: BatchKind::Elimination,
                grid_point,
                pulls: self.active.iter().map(|&arm| (arm, per_arm)).collect(),
            }
        };
        self.pending = Some(plan.clone());
        Some(plan)
    }

    /// Records the rewards of the pending plan, in plan order, and applies
    /// the elimination rule.
    ///
    /// # Panics
    ///
    /// If there is no pending plan or the reward count does not match it.
    pub fn complete(&mut self, rewards: &[f64]) {
        let plan = self.pending.take().expect("complete() called without a pending plan");
        assert_eq!(
            rewards.len() as u64,
            plan.total_pulls(),
            "reward count does not match the plan"
        );

        let mut cursor = 0usize;
        for &(arm, n) in &plan.pulls {
            for &reward in &rewards[cursor..cursor + n as usize] {
                self.sums[arm] += reward;
            }
            cursor += n as usize;
            self.counts[arm] += n;
            self.used += n;
        }

        let active = self.active.clone();
        let counts: Vec<u64> = active.iter().map(|&a| self.counts[a]).collect();
        let means: Vec<f64> = active
            .iter()
            .map(|&a| {
                if self.counts[a] == 0 {
                    0.0
                } else {
                    self.sums[a] / self.counts[a] as f64
                }
            })
            .collect();

        let mut threshold = None;
        let mut eliminated = Vec::new();
        match plan.kind {
            BatchKind::Elimination => {
                let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let width = self.threshold(plan.grid_point);
                threshold = Some(width);
                let mut survivors = Vec::with_capacity(active.len());
                for (&arm, &mean) in active.iter().zip(&means) {
                    let deficit = best - mean;
                    if deficit < width {
                        survivors.push(arm);
                    } else {
                        eliminated.push((arm, deficit));
                    }
                }
                self.active = survivors;
                self.next_grid += 1;
            }
            BatchKind::Truncated | BatchKind::Remainder => self.finished = true,
        }

        self.outcomes.push(BatchOutcome {
            round: plan.round,
            kind: plan.kind,
            grid_point: plan.grid_point,
            active,
            counts,
            means,
            threshold,
            eliminated,
        });
    }

    pub(crate) fn into_outcomes(self) -> (BatchConfig, Vec<u64>, f64, Vec<u64>, Vec<BatchOutcome>) {
        (self.config, self.grid, self.log_term, self.counts, self.outcomes)
    }
}
