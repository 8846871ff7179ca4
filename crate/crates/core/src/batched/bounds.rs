use super::config::BatchConfig;
use crate::instance::Instance;
use crate::math;

/// `ln(T³N)`, the confidence term shared by the elimination threshold and
/// the high-probability event on empirical means.
pub fn confidence_log_term(horizon: u64, arms: usize) -> f64 {
    3.0 * math::ln(horizon as f64) + math::ln(arms as f64)
}

/// `r(a)`: the smallest 1-based grid index with `T_r > 64 ln(T³N) / Δ_a²`.
///
/// `None` when `gap` is zero or no grid point is large enough.
pub fn elimination_deadline(grid: &[u64], log_term: f64, gap: f64) -> Option<u32> {
    if !(gap > 0.0) {
        return None;
    }
    let needed = 64.0 * log_term / (gap * gap);
    grid.iter().position(|&t| t as f64 > needed).map(|i| i as u32 + 1)
}

/// `min{⌈log_λ(64 ln(T³N)/Δ(I)²)⌉ + 1, ⌈log_λ T⌉}`; only the second term
/// applies when `Δ(I)` is zero or undefined.
pub fn analytic_round_bound(instance: &Instance, config: &BatchConfig) -> u32 {
    let worst = config.max_batches();
    match instance.min_gap() {
        Some(gap) if gap > 0.0 => {
            let target = 64.0 * confidence_log_term(config.horizon, instance.len()) / (gap * gap);
            let adaptive = math::ceil_log(config.lambda_grid, target) + 1;
            adaptive.min(worst)
        }
        _ => worst,
    }
}

/// `Σ_{a≠⋆} 200·λ·ln(TN)/Δ_a`, or `+∞` if a non-star arm ties the star.
pub fn analytic_regret_bound(instance: &Instance, config: &BatchConfig) -> f64 {
    let log_tn = math::ln(config.horizon as f64 * instance.len() as f64);
    let star = instance.star();
    let mut total = 0.0;
    for (arm, &gap) in instance.gaps().iter().enumerate() {
        if arm == star {
            continue;
        }
        if gap == 0.0 {
            return f64::INFINITY;
        }
        total += 200.0 * config.lambda_grid * log_tn / gap;
    }
    total
}
