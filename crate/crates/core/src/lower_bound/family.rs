use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::math;

pub const DEFAULT_BETA: f64 = 4.0;
pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_LAMBDA_LB: f64 = 1e-6;
/// `lambda_lb` preset for checks that need non-trivial transcript lengths.
pub const SCALED_LAMBDA_LB: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// `I_ℓ^σ`: Bernoulli arms with means `1/2 + σ/β^ℓ` and `1/2 − σ/β^ℓ`.
pub fn hard_input(ell: u32, sign: Sign, beta: f64) -> Result<Instance> {
    let offset = sign.value() / math::powi(beta, ell as i32);
    let means = [0.5 + offset, 0.5 - offset];
    if means.iter().any(|&m| !(m > 0.0 && m < 1.0)) {
        return Err(Error::MeanOutOfRange);
    }
    Instance::bernoulli(&means)
}

/// The `2L` two-arm inputs `I_1^+, I_1^−, ..., I_L^+, I_L^−` and the
/// constants of the analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct HardFamily {
    pub levels: u32,
    pub beta: f64,
    pub agents: usize,
    pub horizon: u64,
    pub eps: f64,
    pub lambda_lb: f64,
    /// `log₂(L) / (2·lambda_lb)`; zero when `L = 1`.
    pub alpha: f64,
    inputs: Vec<Instance>,
}

/// Builds the family with `L = ⌊log₂(4KT)/4⌋` (at least 1) levels.
pub fn make_hard_family(agents: usize, horizon: u64, beta: f64, eps: f64, lambda_lb: f64) -> Result<HardFamily> {
    if agents == 0 || horizon == 0 {
        return Err(Error::InvalidConfig("agents and horizon must be at least 1"));
    }
    if !(beta > 1.0) {
        return Err(Error::InvalidConfig("beta must exceed 1"));
    }
    if !(eps > 0.0) || !(lambda_lb > 0.0) {
        return Err(Error::InvalidConfig("eps and lambda_lb must be positive"));
    }
    let scale = 4.0 * agents as f64 * horizon as f64;
    if scale < 16.0 {
        return Err(Error::InvalidConfig("4·K·T must be at least 16"));
    }
    let levels = (math::floor(math::log2(scale) / 4.0) as u32).max(1);
    let mut inputs = Vec::with_capacity(2 * levels as usize);
    for ell in 1..=levels {
        inputs.push(hard_input(ell, Sign::Plus, beta)?);
        inputs.push(hard_input(ell, Sign::Minus, beta)?);
    }
    Ok(HardFamily {
        levels,
        beta,
        agents,
        horizon,
        eps,
        lambda_lb,
        alpha: math::log2(levels as f64) / (2.0 * lambda_lb),
        inputs,
    })
}

impl HardFamily {
    pub fn with_lambda_lb(&self, lambda_lb: f64) -> Self {
        let mut out = self.clone();
        out.lambda_lb = lambda_lb;
        out.alpha = math::log2(self.levels as f64) / (2.0 * lambda_lb);
        out
    }

    pub fn inputs(&self) -> &[Instance] {
        &self.inputs
    }

    /// `I_ℓ^σ`, `1 <= ℓ <= L`.
    pub fn input(&self, ell: u32, sign: Sign) -> &Instance {
        let base = 2 * (ell as usize - 1);
        match sign {
            Sign::Plus => &self.inputs[base],
            Sign::Minus => &self.inputs[base + 1],
        }
    }

    /// `𝓘_ℓ = {I_ℓ^+, I_ℓ^−, ..., I_L^+, I_L^−}`.
    pub fn suffix(&self, ell: u32) -> &[Instance] {
        &self.inputs[2 * (ell as usize - 1)..]
    }

    /// Label like `I_3^-` for the input at `index` in [`inputs`](Self::inputs).
    pub fn label(&self, index: usize) -> (u32, Sign) {
        let ell = index as u32 / 2 + 1;
        let sign = if index.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        (ell, sign)
    }

    /// `Δ_ℓ = 2/β^ℓ`.
    pub fn gap(&self, ell: u32) -> f64 {
        2.0 / math::powi(self.beta, ell as i32)
    }

    /// `β^{2ℓ}` for a possibly fractional exponent.
    pub fn beta_pow(&self, exponent: f64) -> f64 {
        math::powf(self.beta, exponent)
    }

    pub fn log2_levels(&self) -> f64 {
        math::log2(self.levels as f64)
    }

    /// Largest transcript length for which level `ℓ` enters event `E`:
    /// `⌊lambda_lb·β^{2ℓ}/log₂ L⌋`. `None` when `L <= 1`.
    pub fn max_qualifying_length(&self, ell: u32) -> Option<u64> {
        let log_l = self.log2_levels();
        if log_l <= 0.0 {
            return None;
        }
        Some(math::floor(self.lambda_lb * self.beta_pow(2.0 * ell as f64) / log_l) as u64)
    }
}
