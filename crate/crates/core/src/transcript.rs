//! Ordered records of pulls and observed rewards.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub arm: usize,
    pub reward: f64,
    pub agent: usize,
    /// 1-based round (or batch) in which the pull happened.
    pub round: u32,
}

impl Entry {
    pub fn new(arm: usize, reward: f64) -> Self {
        Self {
            arm,
            reward,
            agent: 0,
            round: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Transcript {
    entries: Vec<Entry>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            entries: Vec::with_capacity(capacity),
        }
    }

    /// Single-agent, single-round transcript from `(arm, reward)` pairs.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Self {
        Self {
            entries: pairs.iter().map(|&(a, r)| Entry::new(a, r)).collect(),
        }
    }

    pub fn push(&mut self, entry: Entry) {
        self.entries.push(entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Entry> {
        self.entries.iter()
    }

    /// Prefix of length `n` (or the whole transcript if shorter).
    pub fn prefix(&self, n: usize) -> Transcript {
        Transcript {
            entries: self.entries[..n.min(self.entries.len())].to_vec(),
        }
    }

    pub fn extend_from(&mut self, other: &Transcript) {
        self.entries.extend_from_slice(&other.entries);
    }

    pub fn concat(&self, other: &Transcript) -> Transcript {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// Pull counts per arm; fails on an index `>= arms`.
    pub fn arm_counts(&self, arms: usize) -> Result<Vec<u64>> {
        let mut counts = alloc::vec![0u64; arms];
        for (index, e) in self.entries.iter().enumerate() {
            match counts.get_mut(e.arm) {
                Some(c) => *c += 1,
                None => {
                    return Err(Error::InvalidTranscript {
                        index,
                        arm: e.arm,
                        arms,
                    })
                }
            }
        }
        Ok(counts)
    }

    /// Checks arm indices and that rounds never decrease within an agent.
    pub fn is_well_formed(&self, arms: usize) -> bool {
        let mut last_round: Vec<(usize, u32)> = Vec::new();
        for e in &self.entries {
            if e.arm >= arms || !(0.0..=1.0).contains(&e.reward) {
                return false;
            }
            match last_round.iter_mut().find(|(agent, _)| *agent == e.agent) {
                Some((_, round)) => {
                    if e.round < *round {
                        return false;
                    }
                    *round = e.round;
                }
                None => last_round.push((e.agent, e.round)),
            }
        }
        true
    }
}

impl<'a> IntoIterator for &'a Transcript {
    type Item = &'a Entry;
    type IntoIter = core::slice::Iter<'a, Entry>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

impl FromIterator<Entry> for Transcript {
    fn from_iter<I: IntoIterator<Item = Entry>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}
