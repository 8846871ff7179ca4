use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::math;
use crate::transcript::Transcript;

/// `g_I(γ)` held in log space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Likelihood {
    /// `ln g_I(γ)`; `-∞` when some reward is off its arm's support.
    pub log: f64,
    /// Index of the first entry with zero probability.
    pub zero_at: Option<usize>,
}

impl Likelihood {
    pub fn value(&self) -> f64 {
        math::exp(self.log)
    }

    pub fn is_zero(&self) -> bool {
        self.zero_at.is_some()
    }
}

/// Probability that pulling `instance` along `j(γ)` yields exactly `o(γ)`.
pub fn transcript_likelihood(instance: &Instance, transcript: &Transcript) -> Result<Likelihood> {
    let mut log = 0.0;
    for (index, e) in transcript.iter().enumerate() {
        if e.arm >= instance.len() {
            return Err(Error::InvalidTranscript {
                index,
                arm: e.arm,
                arms: instance.len(),
            });
        }
        let p = instance.arm(e.arm).probability_of(e.reward);
        if p == 0.0 {
            return Ok(Likelihood {
                log: f64::NEG_INFINITY,
                zero_at: Some(index),
            });
        }
        log += math::ln(p);
    }
    Ok(Likelihood { log, zero_at: None })
}

/// `ln(Pr[Θ_A(arm) = reward] / Pr[Θ_B(arm) = reward])`; `None` if either
/// probability is zero.
pub fn step_log_ratio(a: &Instance, b: &Instance, arm: usize, reward: f64) -> Option<f64> {
    let pa = a.arm(arm).probability_of(reward);
    let pb = b.arm(arm).probability_of(reward);
    (pa > 0.0 && pb > 0.0).then(|| math::ln(pa) - math::ln(pb))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LikelihoodTrace {
    /// `ln(g_A(γ_t)/g_B(γ_t))` for `t = 0..=n`.
    pub log_ratio: Vec<f64>,
    /// `Z_t = log_ratio_t − (11/β^{2ℓ})·t`.
    pub martingale: Vec<f64>,
    /// Per-step increments of `log_ratio`.
    pub steps: Vec<f64>,
    /// `5/β^ℓ`.
    pub step_bound: f64,
    /// `11/β^{2ℓ}`.
    pub drift_bound: f64,
    /// First step whose increment exceeds `step_bound` in absolute value.
    pub first_violation: Option<usize>,
}

impl LikelihoodTrace {
    pub fn max_abs_step(&self) -> f64 {
        self.steps.iter().map(|s| math::abs(*s)).fold(0.0, f64::max)
    }

    pub fn step_bound_holds(&self) -> bool {
        self.first_violation.is_none()
    }

    pub fn final_log_ratio(&self) -> f64 {
        *self.log_ratio.last().unwrap_or(&0.0)
    }
}

/// Prefix log-likelihood ratios of `A` against `B` along `transcript`.
pub fn llr_trace(a: &Instance, b: &Instance, transcript: &Transcript, ell: u32, beta: f64) -> Result<LikelihoodTrace> {
    let n = transcript.len();
    let step_bound = 5.0 / math::powi(beta, ell as i32);
    let drift_bound = 11.0 / math::powi(beta, 2 * ell as i32);
    let mut log_ratio = Vec::with_capacity(n + 1);
    let mut martingale = Vec::with_capacity(n + 1);
    let mut steps = Vec::with_capacity(n);
    let mut first_violation = None;
    let mut current = 0.0;
    log_ratio.push(0.0);
    martingale.push(0.0);
    for (index, e) in transcript.iter().enumerate() {
        if e.arm >= a.len() || e.arm >= b.len() {
            return Err(Error::InvalidTranscript {
                index,
                arm: e.arm,
                arms: a.len().min(b.len()),
            });
        }
        let step = step_log_ratio(a, b, e.arm, e.reward).ok_or(Error::UndefinedRatio { step: index })?;
        if first_violation.is_none() && math::abs(step) > step_bound {
            first_violation = Some(index);
        }
        current += step;
        steps.push(step);
        log_ratio.push(current);
        martingale.push(current - drift_bound * (index + 1) as f64);
    }
    Ok(LikelihoodTrace {
        log_ratio,
        martingale,
        steps,
        step_bound,
        drift_bound,
        first_violation,
    })
}
