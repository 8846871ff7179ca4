use alloc::vec::Vec;

use super::family::HardFamily;
use crate::error::{Error, Result};
use crate::math;
use crate::transcript::Transcript;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventWitness {
    pub ell: u32,
    /// Indices into [`HardFamily::inputs`].
    pub a: usize,
    pub b: usize,
    pub log_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventECheck {
    pub holds: bool,
    /// `L <= 1`: `log₂ L <= 0` and no level can qualify.
    pub degenerate: bool,
    /// Levels with `lambda_lb·β^{2ℓ}/log₂ L >= |γ|`.
    pub qualifying_levels: Vec<u32>,
    /// Largest `ln(g_A/g_B)` over the qualifying pairs (0 if none).
    pub max_log_ratio: f64,
    pub witness: Option<EventWitness>,
}

impl HardFamily {
    /// Whether level `ℓ` enters event `E` for a transcript of length `n`.
    pub fn level_qualifies(&self, ell: u32, n: usize) -> bool {
        let log_l = self.log2_levels();
        log_l > 0.0 && self.lambda_lb * self.beta_pow(2.0 * ell as f64) / log_l >= n as f64
    }
}

/// Event `E(γ)`: for every qualifying level `ℓ` and ordered pair
/// `A, B ∈ 𝓘_ℓ`, `ln(g_A(γ)/g_B(γ)) <= 2ε`.
///
/// The transcript must come from a two-arm Bernoulli input (rewards 0/1).
pub fn event_e_check(family: &HardFamily, transcript: &Transcript) -> Result<EventECheck> {
    let mut counts = [[0u64; 2]; 2];
    for (index, e) in transcript.iter().enumerate() {
        if e.arm >= 2 {
            return Err(Error::InvalidTranscript {
                index,
                arm: e.arm,
                arms: 2,
            });
        }
        let outcome = if e.reward == 1.0 {
            1
        } else if e.reward == 0.0 {
            0
        } else {
            return Err(Error::UndefinedRatio { step: index });
        };
        counts[e.arm][outcome] += 1;
    }

    if family.log2_levels() <= 0.0 {
        return Ok(EventECheck {
            holds: true,
            degenerate: true,
            qualifying_levels: Vec::new(),
            max_log_ratio: 0.0,
            witness: None,
        });
    }

    let log_g: Vec<f64> = family
        .inputs()
        .iter()
        .map(|inst| {
            (0..2)
                .map(|arm| {
                    let p = inst.mean(arm);
                    counts[arm][1] as f64 * math::ln(p) + counts[arm][0] as f64 * math::ln(1.0 - p)
                })
                .sum()
        })
        .collect();

    let n = transcript.len();
    let qualifying: Vec<u32> = (1..=family.levels)
        .filter(|&ell| family.level_qualifies(ell, n))
        .collect();
    let limit = 2.0 * family.eps;
    let mut max_log_ratio = 0.0f64;
    let mut witness = None;
    for &ell in &qualifying {
        let start = 2 * (ell as usize - 1);
        let members = start..log_g.len();
        let a = members.clone().max_by(|&x, &y| log_g[x].total_cmp(&log_g[y])).unwrap();
        let b = members.min_by(|&x, &y| log_g[x].total_cmp(&log_g[y])).unwrap();
        let ratio = log_g[a] - log_g[b];
        max_log_ratio = max_log_ratio.max(ratio);
        if witness.is_none() && ratio > limit {
            witness = Some(EventWitness {
                ell,
                a,
                b,
                log_ratio: ratio,
            });
        }
    }
    Ok(EventECheck {
        holds: witness.is_none(),
        degenerate: false,
        qualifying_levels: qualifying,
        max_log_ratio,
        witness,
    })
}

/// `Σ exp(−ε²β^{2ℓ}/(200n))` over qualifying levels `ℓ` and ordered pairs
/// `A ≠ B` in `𝓘_ℓ`: the union of the Azuma tails for a length-`n`
/// transcript.
pub fn azuma_tail_bound(family: &HardFamily, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (1..=family.levels)
        .filter(|&ell| family.level_qualifies(ell, n))
        .map(|ell| {
            let members = 2.0 * (family.levels - ell + 1) as f64;
            let pairs = members * (members - 1.0);
            let exponent = family.eps * family.eps * family.beta_pow(2.0 * ell as f64) / (200.0 * n as f64);
            pairs * math::exp(-exponent)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lower_bound::{make_hard_family, SCALED_LAMBDA_LB};

    fn family() -> HardFamily {
        make_hard_family(4, 1 << 14, 4.0, 0.1, SCALED_LAMBDA_LB).unwrap()
    }

    #[test]
    fn empty_transcript_passes() {
        let check = event_e_check(&family(), &Transcript::new()).unwrap();
        assert!(check.holds);
        assert_eq!(check.qualifying_levels, [1, 2, 3, 4]);
        assert_eq!(check.max_log_ratio, 0.0);
    }

    #[test]
    fn long_transcript_is_vacuous() {
        let f = family();
        let n = f.max_qualifying_length(f.levels).unwrap() as usize + 1;
        let t = Transcript::from_pairs(&alloc::vec![(0, 1.0); n]);
        let check = event_e_check(&f, &t).unwrap();
        assert!(check.holds);
        assert!(check.qualifying_levels.is_empty());
    }

    #[test]
    fn degenerate_family() {
        let f = make_hard_family(1, 4, 4.0, 0.1, 1e-6).unwrap();
        let check = event_e_check(&f, &Transcript::from_pairs(&[(0, 1.0)])).unwrap();
        assert!(check.holds && check.degenerate);
    }

    #[test]
    fn lopsided_transcript_fails_with_witness() {
        // 12 successes on arm 0 at level 2 (qualifying length 12): the
        // ratio of I_2^+ against I_2^- is 12·ln(0.5625/0.4375) ≈ 3.0.
        let f = family();
        assert_eq!(f.max_qualifying_length(2), Some(12));
        let t = Transcript::from_pairs(&[(0, 1.0); 12]);
        let check = event_e_check(&f, &t).unwrap();
        assert!(!check.holds);
        let w = check.witness.unwrap();
        assert_eq!((w.ell, w.a, w.b), (2, 2, 3));
        assert!((w.log_ratio - 12.0 * libm::log(0.5625 / 0.4375)).abs() < 1e-12);
    }

    #[test]
    fn witness_matches_brute_force_pairs() {
        let f = family();
        let t = Transcript::from_pairs(&[(0, 1.0), (1, 0.0), (0, 1.0), (0, 0.0), (1, 0.0), (0, 1.0)]);
        let check = event_e_check(&f, &t).unwrap();
        let mut brute = 0.0f64;
        for &ell in &check.qualifying_levels {
            for a in f.suffix(ell) {
                for b in f.suffix(ell) {
                    let la = crate::lower_bound::transcript_likelihood(a, &t).unwrap().log;
                    let lb = crate::lower_bound::transcript_likelihood(b, &t).unwrap().log;
                    brute = brute.max(la - lb);
                }
            }
        }
        assert!((check.max_log_ratio - brute).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_binary_rewards() {
        let t = Transcript::from_pairs(&[(0, 0.5)]);
        assert!(event_e_check(&family(), &t).is_err());
    }

    #[test]
    fn azuma_tail_counts_pairs() {
        let f = family();
        assert_eq!(azuma_tail_bound(&f, 0), 0.0);
        // n = 13 qualifies levels 3 and 4 only: 4·3 + 2·1 ordered pairs.
        let n = 13;
        let expected: f64 = [(3u32, 12.0), (4, 2.0)]
            .iter()
            .map(|&(ell, pairs)| pairs * libm::exp(-0.01 * libm::pow(16.0, ell as f64) / (200.0 * n as f64)))
            .sum();
        assert!((azuma_tail_bound(&f, n) - expected).abs() < 1e-12);
    }
}
