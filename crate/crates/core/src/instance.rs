//! Arms with known reward distributions and the instances built from them.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

const PROB_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArmKind {
    Bernoulli,
    /// Finitely supported distribution on `[0, 1]`.
    Discrete,
}

/// A reward distribution with support in `[0, 1]`.
///
/// Bernoulli arms keep their support as `[(0, 1 - p), (1, p)]` so likelihood
/// code can treat both kinds alike.
#[derive(Clone, Debug, PartialEq)]
pub struct Arm {
    kind: ArmKind,
    mean: f64,
    support: Vec<(f64, f64)>,
}

impl Arm {
    pub fn bernoulli(mean: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mean) {
            return Err(Error::InvalidArm("Bernoulli mean must lie in [0, 1]"));
        }
        Ok(Self {
            kind: ArmKind::Bernoulli,
            mean,
            support: alloc::vec![(0.0, 1.0 - mean), (1.0, mean)],
        })
    }

    pub fn discrete(support: Vec<(f64, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidArm("support is empty"));
        }
        let mut total = 0.0;
        let mut mean = 0.0;
        for &(value, p) in &support {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidArm("support value outside [0, 1]"));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArm("probability outside [0, 1]"));
            }
            total += p;
            mean += value * p;
        }
        if math::abs(total - 1.0) > PROB_TOLERANCE {
            return Err(Error::InvalidArm("probabilities must sum to 1"));
        }
        Ok(Self {
            kind: ArmKind::Discrete,
            mean,
            support,
        })
    }

    pub fn kind(&self) -> ArmKind {
        self.kind
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    /// Probability of observing exactly `reward`; zero off the support.
    pub fn probability_of(&self, reward: f64) -> f64 {
        self.support
            .iter()
            .filter(|&&(value, _)| value == reward)
            .map(|&(_, p)| p)
            .sum()
    }
}

/// An ordered list of arms together with the derived gap structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    arms: Vec<Arm>,
    star: usize,
    gaps: Vec<f64>,
    min_gap: Option<f64>,
}

impl Instance {
    pub fn new(arms: Vec<Arm>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::EmptyInstance);
        }
        // Lowest index wins ties.
        let mut star = 0;
        for (i, arm) in arms.iter().enumerate() {
            if arm.mean() > arms[star].mean() {
                star = i;
            }
        }
        let best = arms[star].mean();
        let gaps: Vec<f64> = arms.iter().map(|a| best - a.mean()).collect();
        let min_gap = gaps
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != star)
            .map(|(_, &g)| g)
            .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |m| m.min(g))));
        Ok(Self {
            arms,
            star,
            gaps,
            min_gap,
        })
    }

    pub fn bernoulli(means: &[f64]) -> Result<Self> {
        let arms = means.iter().map(|&m| Arm::bernoulli(m)).collect::<Result<Vec<_>>>()?;
        Self::new(arms)
    }

    pub fn arms(&self) -> &[Arm] {
        &self.arms
    }

    pub fn arm(&self, index: usize) -> &Arm {
        &self.arms[index]
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn star(&self) -> usize {
        self.star
    }

    pub fn best_mean(&self) -> f64 {
        self.arms[self.star].mean()
    }

    pub fn mean(&self, index: usize) -> f64 {
        self.arms[index].mean()
    }

    pub fn gap(&self, index: usize) -> f64 {
        self.gaps[index]
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// `Δ(I)`: smallest gap over arms other than the star, `None` for a
    /// single arm. Zero when another arm ties with the star.
    pub fn min_gap(&self) -> Option<f64> {
        self.min_gap
    }

    /// True when every arm has the same mean (including `N = 1`).
    pub fn all_means_equal(&self) -> bool {
        self.gaps.iter().all(|&g| g == 0.0)
    }

    pub fn is_two_arm_bernoulli(&self) -> bool {
        self.arms.len() == 2 && self.arms.iter().all(|a| a.kind() == ArmKind::Bernoulli)
    }

    /// Regret of pulling each arm `counts[a]` times.
    pub fn regret_from_counts(&self, counts: &[u64]) -> f64 {
        counts.iter().zip(&self.gaps).map(|(&c, &g)| c as f64 * g).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_and_gaps() {
        let inst = Instance::bernoulli(&[0.25, 0.75, 0.5]).unwrap();
        assert_eq!(inst.star(), 1);
        assert_eq!(inst.gaps(), &[0.5, 0.0, 0.25]);
        assert_eq!(inst.min_gap(), Some(0.25));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let inst = Instance::bernoulli(&[0.3, 0.6, 0.6]).unwrap();
        assert_eq!(inst.star(), 1);
        assert_eq!(inst.min_gap(), Some(0.0));
        assert!(!inst.all_means_equal());
        let flat = Instance::bernoulli(&[0.5, 0.5, 0.5]).unwrap();
        assert_eq!(flat.star(), 0);
        assert!(flat.all_means_equal());
    }

    #[test]
    fn single_arm_has_no_gap() {
        let inst = Instance::bernoulli(&[0.4]).unwrap();
        assert_eq!(inst.min_gap(), None);
        assert!(inst.all_means_equal());
    }

    #[test]
    fn rejects_bad_arms() {
        assert!(Arm::bernoulli(1.5).is_err());
        assert!(Arm::discrete(alloc::vec![(0.0, 0.5), (1.0, 0.4)]).is_err());
        assert!(Arm::discrete(alloc::vec![(1.5, 1.0)]).is_err());
        assert!(Arm::discrete(alloc::vec![]).is_err());
        assert_eq!(Instance::new(alloc::vec![]), Err(Error::EmptyInstance));
    }

    #[test]
    fn discrete_mean_and_probability() {
        let arm = Arm::discrete(alloc::vec![(0.0, 0.25), (0.5, 0.5), (1.0, 0.25)]).unwrap();
        assert_eq!(arm.mean(), 0.5);
        assert_eq!(arm.probability_of(0.5), 0.5);
        assert_eq!(arm.probability_of(0.3), 0.0);
        let b = Arm::bernoulli(0.75).unwrap();
        assert_eq!(b.probability_of(1.0), 0.75);
        assert_eq!(b.probability_of(0.0), 0.25);
    }
}
