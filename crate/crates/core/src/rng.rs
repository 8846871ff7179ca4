//! Keyed, seekable random streams.
//!
//! A stream is identified by `(master_seed, path)`. The path is usually
//! `[trial, agent, arm]`; the ChaCha8 key is derived from it with a
//! SplitMix64 chain, so equal keys replay equal sequences and distinct keys
//! give independent ones. Each draw consumes exactly one 64-bit word pair,
//! which makes the stream counter-addressable through [`RngStream::seek`].

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::instance::{Arm, ArmKind};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_key(master_seed: u64, path: &[u64]) -> [u8; 32] {
    let mut state = master_seed;
    let mut acc = splitmix(&mut state);
    for (depth, &id) in path.iter().enumerate() {
        // Fold the depth in so [1, 0] and [1] differ.
        state ^= id.wrapping_add(1).wrapping_mul(GOLDEN) ^ ((depth as u64 + 1) << 56);
        acc ^= splitmix(&mut state);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        acc = acc.wrapping_add(splitmix(&mut state));
        chunk.copy_from_slice(&acc.to_le_bytes());
    }
    key
}

#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    path: Vec<u64>,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64) -> Self {
        Self::keyed(master_seed, Vec::new())
    }

    pub fn keyed(master_seed: u64, path: Vec<u64>) -> Self {
        let rng = ChaCha8Rng::from_seed(derive_key(master_seed, &path));
        Self { master_seed, path, rng }
    }

    /// Fresh stream one level deeper; `self` is left untouched.
    pub fn child(&self, id: u64) -> Self {
        let mut path = self.path.clone();
        path.push(id);
        Self::keyed(self.master_seed, path)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Number of draws consumed so far.
    pub fn position(&self) -> u64 {
        (self.rng.get_word_pos() / 2) as u64
    }

    /// Positions the stream so the next draw is draw number `draw`.
    pub fn seek(&mut self, draw: u64) {
        self.rng.set_word_pos(u128::from(draw) * 2);
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`, `n > 0`.
    pub fn next_index(&mut self, n: usize) -> usize {
        let i = (self.next_unit() * n as f64) as usize;
        i.min(n - 1)
    }
}

/// Draws one reward from `arm`, consuming exactly one draw of `stream`.
pub fn sample_reward(arm: &Arm, stream: &mut RngStream) -> f64 {
    let u = stream.next_unit();
    match arm.kind() {
        ArmKind::Bernoulli => {
            if u < arm.mean() {
                1.0
            } else {
                0.0
            }
        }
        ArmKind::Discrete => {
            let support = arm.support();
            let mut cumulative = 0.0;
            for &(value, p) in support {
                cumulative += p;
                if u < cumulative {
                    return value;
                }
            }
            // Rounding can leave the cumulative mass a hair below 1.
            support
                .iter()
                .rev()
                .find(|&&(_, p)| p > 0.0)
                .map(|&(v, _)| v)
                .unwrap_or(0.0)
        }
    }
}
