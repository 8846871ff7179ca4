use alloc::vec::Vec;

use super::family::HardFamily;
use crate::collab::CollabRun;
use crate::error::{Error, Result};
use crate::math;

/// Level index of a time point: the integer `ℓ` with
/// `β^{2(ℓ−1)} <= αK·t < β^{2ℓ}`, and its clamp to `[1, L]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelIndex {
    /// `None` when `αK·t <= 0` (only for `α = 0`, i.e. `L = 1`).
    pub raw: Option<i64>,
    pub ell: u32,
    pub clamped: bool,
}

pub fn level_of_time(family: &HardFamily, t: f64) -> LevelIndex {
    let x = family.alpha * family.agents as f64 * t;
    let raw = if x > 0.0 && x.is_finite() {
        let mut ell = math::floor(math::ln(x) / (2.0 * math::ln(family.beta))) as i64 + 1;
        while family.beta_pow(2.0 * (ell - 1) as f64) > x {
            ell -= 1;
        }
        while family.beta_pow(2.0 * ell as f64) <= x {
            ell += 1;
        }
        Some(ell)
    } else {
        None
    };
    let levels = i64::from(family.levels);
    let ell = raw.unwrap_or(1).clamp(1, levels);
    LevelIndex {
        raw,
        ell: ell as u32,
        clamped: raw != Some(ell),
    }
}

fn boundary_value(run: &CollabRun, r: usize) -> f64 {
    let (num, den) = run.boundary(r);
    num as f64 / den as f64
}

/// `τ(γ, ℓ)`: the first round `r` whose start `t_{r−1}` lies in
/// `[β^{2(ℓ−1)}/(αK), β^{2ℓ}/(αK))`.
pub fn tau(run: &CollabRun, family: &HardFamily, ell: u32) -> Option<usize> {
    let scale = family.alpha * family.agents as f64;
    let lo = family.beta_pow(2.0 * (ell as f64 - 1.0));
    let hi = family.beta_pow(2.0 * ell as f64);
    (1..=run.rounds()).find(|&r| {
        let x = scale * boundary_value(run, r - 1);
        lo <= x && x < hi
    })
}

/// `ζ_ℓ = (β^{2ℓ}/α)·(β^{2(L/R−1)}/(8K))`, unfloored.
pub fn zeta(family: &HardFamily, ell: u32, rounds: u32) -> f64 {
    let l_over_r = family.levels as f64 / rounds as f64;
    family.beta_pow(2.0 * ell as f64) / family.alpha * family.beta_pow(2.0 * (l_over_r - 1.0))
        / (8.0 * family.agents as f64)
}

/// `4L/log₂K <= R <= 2L/log₂log₂L`.
pub fn r_range_holds(family: &HardFamily, rounds: u32) -> bool {
    let l = family.levels as f64;
    let log_k = math::log2(family.agents as f64);
    let loglog_l = math::log2(math::log2(l));
    let r = rounds as f64;
    if log_k <= 0.0 || loglog_l.is_nan() || loglog_l == f64::NEG_INFINITY {
        return false;
    }
    let upper_ok = loglog_l <= 0.0 || r <= 2.0 * l / loglog_l;
    4.0 * l / log_k <= r && upper_ok
}

/// `L/R >= log_β(α)/2 + 1`, under which `ℓ(γ) <= L`.
pub fn level_cap_precondition(family: &HardFamily, rounds: u32) -> bool {
    if family.alpha <= 0.0 {
        return true;
    }
    let log_beta_alpha = math::ln(family.alpha) / math::ln(family.beta);
    family.levels as f64 / rounds as f64 >= log_beta_alpha / 2.0 + 1.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundIndexReport {
    pub rounds: u32,
    /// `F_r` for `r = 1..=R`; rounds the run never reached are `false`.
    pub f_flags: Vec<bool>,
    /// Number of `F_r` that hold; 1 for every run with `K·t_R >= KT`.
    pub partition_count: usize,
    pub r_of_gamma: Option<usize>,
    /// `t_{r(γ)−1}`.
    pub t_prev: f64,
    pub level: LevelIndex,
    pub ell_of_gamma: u32,
    pub clamped: bool,
    /// `τ(γ, ℓ(γ))`; equals `r(γ)` when unclamped.
    pub tau: Option<usize>,
    pub zeta: f64,
    /// `m_r = t_r − t_{r−1}` at `r = r(γ)`.
    pub m_r: f64,
    pub r_range: bool,
    pub level_cap_precondition: bool,
    /// `β^{2(ℓ−1)}/(αK) <= t_{r−1} < β^{2ℓ}/(αK)`.
    pub window_holds: bool,
}

/// Locates `F_r` for a run with at most `R` rounds and derives `ℓ(γ)`,
/// `τ`, `ζ_ℓ` and `m_r` from it.
pub fn round_index_report(run: &CollabRun, family: &HardFamily, rounds: u32) -> Result<RoundIndexReport> {
    if run.rounds() > rounds as usize || rounds == 0 {
        return Err(Error::TooManyRounds {
            rounds: run.rounds(),
            requested: rounds as usize,
        });
    }
    let mut f_flags = Vec::with_capacity(rounds as usize);
    let mut earlier_reached = false;
    for r in 1..=rounds as usize {
        let reaches = r <= run.rounds() && run.ratio_reaches(r, rounds);
        f_flags.push(reaches && !earlier_reached);
        earlier_reached |= reaches;
    }
    let partition_count = f_flags.iter().filter(|&&f| f).count();
    let r_of_gamma = f_flags.iter().position(|&f| f).map(|i| i + 1);

    let r = r_of_gamma.unwrap_or(1);
    let t_prev = boundary_value(run, r - 1);
    let m_r = if r <= run.rounds() {
        boundary_value(run, r) - t_prev
    } else {
        0.0
    };
    let level = level_of_time(family, t_prev);
    let ell = level.ell;
    let scale = family.alpha * family.agents as f64;
    let x = scale * t_prev;
    let window_holds = family.beta_pow(2.0 * (ell as f64 - 1.0)) <= x && x < family.beta_pow(2.0 * ell as f64);
    Ok(RoundIndexReport {
        rounds,
        f_flags,
        partition_count,
        r_of_gamma,
        t_prev,
        level,
        ell_of_gamma: ell,
        clamped: level.clamped,
        tau: tau(run, family, ell),
        zeta: zeta(family, ell, rounds),
        m_r,
        r_range: r_range_holds(family, rounds),
        level_cap_precondition: level_cap_precondition(family, rounds),
        window_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lower_bound::make_hard_family;
    use crate::transcript::Transcript;
    use alloc::vec;

    fn run_with_ends(agents: usize, horizon: u64, ends: &[u64]) -> CollabRun {
        CollabRun {
            agents,
            horizon,
            per_agent_transcripts: vec![Transcript::new(); agents],
            round_ends: ends.to_vec(),
            comm_steps: ends.len().saturating_sub(1),
            total_regret: 0.0,
            per_agent_regret: vec![0.0; agents],
            pulls_per_arm_total: vec![0, 0],
            batch_runs: Vec::new(),
        }
    }

    #[test]
    fn second_round_carries_the_ratio() {
        let family = make_hard_family(2, 64, 4.0, 0.1, 0.1).unwrap();
        let run = run_with_ends(2, 64, &[4, 64]);
        let report = round_index_report(&run, &family, 2).unwrap();
        assert_eq!(report.f_flags, [false, true]);
        assert_eq!(report.partition_count, 1);
        assert_eq!(report.r_of_gamma, Some(2));
        assert_eq!(report.t_prev, 4.0);
        assert_eq!(report.m_r, 60.0);
    }

    #[test]
    fn geometric_boundaries_stop_at_first_round() {
        // K = 4, T = 16, R = 2: t_r = (1/4)·8^r.
        let family = make_hard_family(4, 16, 4.0, 0.1, 0.1).unwrap();
        let run = run_with_ends(4, 16, &[2, 16]);
        let report = round_index_report(&run, &family, 2).unwrap();
        assert_eq!(report.r_of_gamma, Some(1));
        assert_eq!(report.partition_count, 1);
    }

    #[test]
    fn level_matches_scan() {
        let family = make_hard_family(4, 1 << 20, 4.0, 0.1, 0.1).unwrap();
        for &t in &[0.25, 1.0, 4.0, 17.0, 300.0, 4096.0, 1e6] {
            let x = family.alpha * 4.0 * t;
            let scanned =
                (-20i64..40).find(|&l| libm::pow(4.0, 2.0 * (l - 1) as f64) <= x && x < libm::pow(4.0, 2.0 * l as f64));
            let level = level_of_time(&family, t);
            assert_eq!(level.raw, scanned, "t = {t}");
            let expected = scanned.unwrap().clamp(1, family.levels as i64) as u32;
            assert_eq!(level.ell, expected);
            assert_eq!(level.clamped, scanned != Some(expected as i64));
        }
    }

    #[test]
    fn tau_agrees_with_r_when_unclamped() {
        let family = make_hard_family(2, 1 << 20, 4.0, 0.1, 0.1).unwrap();
        let run = run_with_ends(2, 1 << 20, &[4, 40, 1 << 20]);
        let report = round_index_report(&run, &family, 3).unwrap();
        if !report.clamped {
            assert_eq!(report.tau, report.r_of_gamma);
            assert!(report.window_holds);
        }
    }

    #[test]
    fn zeta_formula() {
        let family = make_hard_family(4, 1 << 14, 4.0, 0.1, 0.1).unwrap();
        let alpha = libm::log2(4.0) / 0.2;
        let expected = libm::pow(4.0, 4.0) / alpha * libm::pow(4.0, 2.0 * (4.0 / 2.0 - 1.0)) / 32.0;
        assert!((zeta(&family, 2, 2) - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn rejects_runs_longer_than_r() {
        let family = make_hard_family(2, 64, 4.0, 0.1, 0.1).unwrap();
        let run = run_with_ends(2, 64, &[4, 16, 64]);
        assert!(round_index_report(&run, &family, 2).is_err());
    }

    #[test]
    fn r_range_is_narrow_at_small_scale() {
        // L = 5, K = 4: 10 <= R <= 10/log₂log₂5 ≈ 8.2 is empty.
        let family = make_hard_family(4, 1 << 16, 4.0, 0.1, 1e-6).unwrap();
        assert_eq!(family.levels, 5);
        assert!((1..20).all(|r| !r_range_holds(&family, r)));
        // L = 4, K = 4: 8 <= R <= 8.
        let family = make_hard_family(4, 1 << 14, 4.0, 0.1, 1e-6).unwrap();
        let valid: Vec<u32> = (1..20).filter(|&r| r_range_holds(&family, r)).collect();
        assert_eq!(valid, [8]);
    }
}
