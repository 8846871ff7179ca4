use alloc::vec::Vec;

use super::family::HardFamily;
use super::likelihood::step_log_ratio;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArmDrift {
    pub arm: usize,
    /// `E_{O ~ I(arm)}[ln(Pr[Θ_A(arm)=O] / Pr[Θ_B(arm)=O])]`.
    pub drift: f64,
    /// `11/β^{2ℓ}`.
    pub bound: f64,
    pub holds: bool,
}

fn offsets(instance: &Instance, ell: u32, beta: f64) -> Result<[f64; 2]> {
    let radius = 1.0 / math::powi(beta, ell as i32);
    if !instance.is_two_arm_bernoulli() {
        return Err(Error::NotInFamily { ell });
    }
    let d = [instance.mean(0) - 0.5, instance.mean(1) - 0.5];
    if d.iter().any(|x| math::abs(*x) > radius * (1.0 + 1e-12)) {
        return Err(Error::NotInFamily { ell });
    }
    Ok(d)
}

/// Expected one-step change of `ln(g_A/g_B)` when the pulled arm's reward
/// comes from `I`, in the factored form
/// `½ ln((1−4δ_A²)/(1−4δ_B²)) + δ_I ln((1+2δ_A)(1−2δ_B)/((1+2δ_B)(1−2δ_A)))`
/// where `δ_X` is the arm's mean minus 1/2 under `X`.
fn factored_drift(delta_a: f64, delta_b: f64, delta_i: f64) -> f64 {
    let first = 0.5 * (math::ln(1.0 - 4.0 * delta_a * delta_a) - math::ln(1.0 - 4.0 * delta_b * delta_b));
    let second = delta_i
        * (math::ln(1.0 + 2.0 * delta_a) + math::ln(1.0 - 2.0 * delta_b)
            - math::ln(1.0 + 2.0 * delta_b)
            - math::ln(1.0 - 2.0 * delta_a));
    first + second
}

/// Exact per-arm drift of the log-likelihood ratio against `11/β^{2ℓ}`.
///
/// All three inputs must be two-arm Bernoulli inputs whose means lie within
/// `1/β^ℓ` of 1/2.
pub fn drift_bound_check(a: &Instance, b: &Instance, i: &Instance, ell: u32, beta: f64) -> Result<Vec<ArmDrift>> {
    let (da, db, di) = (offsets(a, ell, beta)?, offsets(b, ell, beta)?, offsets(i, ell, beta)?);
    let bound = 11.0 / math::powi(beta, 2 * ell as i32);
    Ok((0..2)
        .map(|arm| {
            let drift = factored_drift(da[arm], db[arm], di[arm]);
            ArmDrift {
                arm,
                drift,
                bound,
                holds: drift <= bound,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepViolation {
    pub ell: u32,
    /// Indices into [`HardFamily::inputs`].
    pub a: usize,
    pub b: usize,
    pub arm: usize,
    pub outcome: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftViolation {
    pub ell: u32,
    pub a: usize,
    pub b: usize,
    pub i: usize,
    pub arm: usize,
    pub drift: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveReport<V> {
    pub levels_checked: u32,
    pub cells_checked: usize,
    /// Largest `value / bound` seen.
    pub worst_ratio: f64,
    /// First violating cell in enumeration order.
    pub violation: Option<V>,
}

impl<V> ExhaustiveReport<V> {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `|ln(Pr_A[o]/Pr_B[o])| <= numerator/β^ℓ` for every level
/// `ℓ <= min(L, max_level)`, ordered pair `A, B ∈ 𝓘_ℓ`, arm, and outcome.
/// The one-step bound uses `numerator = 5`.
///
/// Cells are visited by level, then `A`, `B`, arm, and outcome 1 before 0.
pub fn exhaustive_step_check(family: &HardFamily, max_level: u32, numerator: f64) -> ExhaustiveReport<StepViolation> {
    let top = family.levels.min(max_level);
    let mut cells = 0;
    let mut worst = 0.0f64;
    let mut violation = None;
    for ell in 1..=top {
        let bound = numerator / math::powi(family.beta, ell as i32);
        let offset = 2 * (ell as usize - 1);
        let members = family.suffix(ell);
        for (ai, a) in members.iter().enumerate() {
            for (bi, b) in members.iter().enumerate() {
                for arm in 0..2 {
                    for outcome in [1.0, 0.0] {
                        cells += 1;
                        let value = step_log_ratio(a, b, arm, outcome).unwrap_or(f64::INFINITY);
                        worst = worst.max(math::abs(value) / bound);
                        if violation.is_none() && math::abs(value) > bound {
                            violation = Some(StepViolation {
                                ell,
                                a: offset + ai,
                                b: offset + bi,
                                arm,
                                outcome,
                                value,
                                bound,
                            });
                        }
                    }
                }
            }
        }
    }
    ExhaustiveReport {
        levels_checked: top,
        cells_checked: cells,
        worst_ratio: worst,
        violation,
    }
}

/// Checks the exact drift `<= numerator/β^{2ℓ}` for every level up to
/// `min(L, max_level)`, every triple `(A, B, I) ∈ 𝓘_ℓ³`, and both arms.
/// The drift bound uses `numerator = 11`.
pub fn exhaustive_drift_check(family: &HardFamily, max_level: u32, numerator: f64) -> ExhaustiveReport<DriftViolation> {
    let top = family.levels.min(max_level);
    let mut cells = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut violation = None;
    for ell in 1..=top {
        let bound = numerator / math::powi(family.beta, 2 * ell as i32);
        let offset = 2 * (ell as usize - 1);
        let members = family.suffix(ell);
        for (ai, a) in members.iter().enumerate() {
            for (bi, b) in members.iter().enumerate() {
                for (ii, i) in members.iter().enumerate() {
                    let drifts =
                        drift_bound_check(a, b, i, ell, family.beta).expect("suffix members lie in the family");
                    for d in drifts {
                        cells += 1;
                        worst = worst.max(d.drift / bound);
                        if violation.is_none() && d.drift > bound {
                            violation = Some(DriftViolation {
                                ell,
                                a: offset + ai,
                                b: offset + bi,
                                i: offset + ii,
                                arm: d.arm,
                                drift: d.drift,
                                bound,
                            });
                        }
                    }
                }
            }
        }
    }
    ExhaustiveReport {
        levels_checked: top,
        cells_checked: cells,
        worst_ratio: worst,
        violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lower_bound::{hard_input, make_hard_family, Sign};

    /// Unsimplified expectation `p ln(pa/pb) + (1−p) ln((1−pa)/(1−pb))`.
    fn direct_drift(pa: f64, pb: f64, p: f64) -> f64 {
        p * libm::log(pa / pb) + (1.0 - p) * libm::log((1.0 - pa) / (1.0 - pb))
    }

    #[test]
    fn identical_inputs_have_no_drift() {
        let a = hard_input(2, Sign::Plus, 4.0).unwrap();
        let i = hard_input(3, Sign::Minus, 4.0).unwrap();
        for d in drift_bound_check(&a, &a, &i, 2, 4.0).unwrap() {
            assert_eq!(d.drift, 0.0);
        }
    }

    #[test]
    fn opposite_level_one_drift() {
        let plus = hard_input(1, Sign::Plus, 4.0).unwrap();
        let minus = hard_input(1, Sign::Minus, 4.0).unwrap();
        let d = drift_bound_check(&plus, &minus, &plus, 1, 4.0).unwrap();
        let expected = 0.75 * libm::log(3.0) + 0.25 * libm::log(1.0 / 3.0);
        assert!((d[0].drift - expected).abs() < 1e-15);
        assert!((d[0].drift - 0.5 * libm::log(3.0)).abs() < 1e-15);
        assert_eq!(d[0].bound, 11.0 / 16.0);
        assert!(d[0].holds);
    }

    #[test]
    fn factored_form_matches_direct_expectation() {
        let f = make_hard_family(4, 1 << 22, 4.0, 0.1, 1e-6).unwrap();
        for ell in 1..=f.levels {
            for a in f.suffix(ell) {
                for b in f.suffix(ell) {
                    for i in f.suffix(ell) {
                        let got = drift_bound_check(a, b, i, ell, 4.0).unwrap();
                        for (arm, g) in got.iter().enumerate() {
                            let want = direct_drift(a.mean(arm), b.mean(arm), i.mean(arm));
                            let scale = 1.0 / libm::pow(4.0, 2.0 * ell as f64);
                            assert!((g.drift - want).abs() < 1e-15 + 1e-9 * scale, "ell {ell}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn outside_family_is_rejected() {
        let far = hard_input(1, Sign::Plus, 4.0).unwrap();
        let near = hard_input(2, Sign::Plus, 4.0).unwrap();
        assert_eq!(
            drift_bound_check(&far, &near, &near, 2, 4.0),
            Err(Error::NotInFamily { ell: 2 })
        );
        let three = Instance::bernoulli(&[0.5, 0.5, 0.5]).unwrap();
        assert!(drift_bound_check(&three, &near, &near, 2, 4.0).is_err());
    }

    #[test]
    fn exhaustive_checks_pass_with_paper_constants() {
        let f = make_hard_family(4, 1 << 22, 4.0, 0.1, 1e-6).unwrap();
        assert_eq!(f.levels, 6);
        let steps = exhaustive_step_check(&f, 6, 5.0);
        assert!(steps.passed(), "{:?}", steps.violation);
        // Σ_ℓ (2(L−ℓ+1))² · 4 cells.
        let expected: usize = (1..=6).map(|l| (2 * (6 - l + 1) as usize).pow(2) * 4).sum();
        assert_eq!(steps.cells_checked, expected);
        let drifts = exhaustive_drift_check(&f, 6, 11.0);
        assert!(drifts.passed(), "{:?}", drifts.violation);
    }

    #[test]
    fn tightened_step_bound_reports_witness() {
        let f = make_hard_family(4, 1 << 14, 4.0, 0.1, 1e-6).unwrap();
        let report = exhaustive_step_check(&f, 6, 4.0);
        let v = report.violation.unwrap();
        assert_eq!((v.ell, v.a, v.b, v.arm, v.outcome), (1, 0, 1, 0, 1.0));
        assert!((v.value - libm::log(3.0)).abs() < 1e-15);
        assert_eq!(v.bound, 1.0);
    }
}
