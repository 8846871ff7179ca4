//! Regret accounting and Monte Carlo estimates with Hoeffding halfwidths.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::math;
use crate::transcript::Transcript;

/// `Σ_t (μ⋆ − μ_{j_t})` over the pulls of `transcript`.
///
/// Computed from per-arm counts, so the value depends only on the multiset
/// of pulled indices, never on rewards or order.
pub fn regret_of_transcript(instance: &Instance, transcript: &Transcript) -> Result<f64> {
    let counts = transcript.arm_counts(instance.len())?;
    Ok(instance.regret_from_counts(&counts))
}

/// Two-sided Hoeffding halfwidth for the mean of `samples` i.i.d. values in
/// an interval of width `range`, at confidence `confidence`.
pub fn hoeffding_halfwidth(range: f64, samples: usize, confidence: f64) -> f64 {
    if samples == 0 {
        return f64::INFINITY;
    }
    let delta = (1.0 - confidence).max(f64::MIN_POSITIVE);
    range * math::sqrt(math::ln(2.0 / delta) / (2.0 * samples as f64))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegretEstimate {
    pub mean: f64,
    pub halfwidth: f64,
    pub samples: usize,
    pub confidence: f64,
    /// Width of the interval each per-run regret is known to lie in.
    pub range: f64,
}

impl RegretEstimate {
    /// Sample mean of `values`, each known to lie in `[0, range]`.
    pub fn from_samples(values: &[f64], range: f64, confidence: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NoRuns);
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Ok(Self {
            mean,
            halfwidth: hoeffding_halfwidth(range, values.len(), confidence),
            samples: values.len(),
            confidence,
            range,
        })
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.halfwidth
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.halfwidth
    }

    pub fn contains(&self, value: f64) -> bool {
        math::abs(self.mean - value) <= self.halfwidth
    }
}

/// Mean regret over `runs` with a Hoeffding halfwidth.
///
/// Each run's regret lies in `[0, |γ|·max_a Δ_a]`; the range used is the
/// largest such bound over the runs. For collaborative runs, pass the merged
/// transcript of all agents so the sum covers every agent's pulls.
pub fn expected_regret(instance: &Instance, runs: &[Transcript], confidence: f64) -> Result<RegretEstimate> {
    if runs.is_empty() {
        return Err(Error::NoRuns);
    }
    let max_gap = instance.gaps().iter().copied().fold(0.0, f64::max);
    let mut values = alloc::vec::Vec::with_capacity(runs.len());
    let mut longest = 0usize;
    for run in runs {
        values.push(regret_of_transcript(instance, run)?);
        longest = longest.max(run.len());
    }
    RegretEstimate::from_samples(&values, longest as f64 * max_gap, confidence)
}
