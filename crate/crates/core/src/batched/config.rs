use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// How the total pull budget is enforced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BudgetMode {
    /// At most `horizon` pulls in total; a batch that would overrun the
    /// budget is cut short round-robin over the active arms and ends the run.
    #[default]
    GlobalCap,
    /// Every active arm always receives its full grid allotment, as in the
    /// per-arm accounting of the analysis; total pulls may exceed `horizon`.
    PerArmGrid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchConfig {
    pub lambda_grid: f64,
    pub horizon: u64,
    pub budget_mode: BudgetMode,
    /// Keep the full pull-by-pull transcript in the resulting run.
    pub record_transcript: bool,
}

impl BatchConfig {
    pub fn new(lambda_grid: f64, horizon: u64) -> Result<Self> {
        let config = Self {
            lambda_grid,
            horizon,
            budget_mode: BudgetMode::GlobalCap,
            record_transcript: true,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_budget_mode(mut self, mode: BudgetMode) -> Self {
        self.budget_mode = mode;
        self
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn without_transcript(mut self) -> Self {
        self.record_transcript = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_grid >= 2.0) || !self.lambda_grid.is_finite() {
            return Err(Error::InvalidConfig("lambda_grid must be a finite value >= 2"));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1"));
        }
        Ok(())
    }

    /// `⌈log_λ T⌉`, at least 1: the number of grid points.
    pub fn max_batches(&self) -> u32 {
        math::ceil_log(self.lambda_grid, self.horizon as f64).max(1)
    }
}

/// Grid points `T_1 < T_2 < ... ` with `T_i = ⌈λ^i⌉` for `i = 1..⌈log_λ T⌉`,
/// the last clamped to `T`. `T_0 = 0` is implicit.
pub fn batch_grid(config: &BatchConfig) -> Vec<u64> {
    let horizon = config.horizon;
    let mut grid: Vec<u64> = Vec::with_capacity(config.max_batches() as usize);
    for i in 1..=config.max_batches() {
        let raw = math::snapped_ceil(math::powi(config.lambda_grid, i as i32));
        let point = if raw >= horizon as f64 { horizon } else { raw as u64 };
        if grid.last().is_none_or(|&last| point > last) {
            grid.push(point);
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lambda: f64, horizon: u64) -> Vec<u64> {
        batch_grid(&BatchConfig::new(lambda, horizon).unwrap())
    }

    #[test]
    fn exact_powers() {
        assert_eq!(grid(2.0, 16), [2, 4, 8, 16]);
        assert_eq!(grid(3.0, 27), [3, 9, 27]);
    }

    #[test]
    fn last_point_clamped() {
        assert_eq!(grid(2.0, 10), [2, 4, 8, 10]);
        assert_eq!(grid(2.0, 1), [1]);
        assert_eq!(grid(2.0, 2), [2]);
        assert_eq!(grid(2.0, 3), [2, 3]);
    }

    #[test]
    fn root_lambda_hits_horizon_in_r_steps() {
        // λ = (KT)^{1/R} must give exactly R grid points.
        let kt: u64 = 1 << 18;
        for r in [2u32, 3, 4, 6, 8] {
            let lambda = libm::pow(kt as f64, 1.0 / r as f64);
            let g = grid(lambda, kt);
            assert_eq!(g.len(), r as usize, "R = {r}: {g:?}");
            assert_eq!(*g.last().unwrap(), kt);
        }
    }

    #[test]
    fn rejects_small_lambda() {
        assert!(BatchConfig::new(1.5, 10).is_err());
        assert!(BatchConfig::new(f64::NAN, 10).is_err());
        assert!(BatchConfig::new(2.0, 0).is_err());
    }
}
