//! Trial-level parallelism with results merged in trial order.

use anyhow::Result;
use collab_bandit_core::RngStream;
use rayon::prelude::*;

pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `threads = 0` uses one worker per available core.
    pub fn new(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(0), ..., f(n − 1)`, evaluated in parallel, returned in index order.
    pub fn map<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

/// The agent-level stream of trial `trial`; arm `a` of agent `k` reads
/// `trial_stream(seed, trial).child(k).child(a)` (or `.child(a)` when the
/// trial has a single logical agent).
pub fn trial_stream(seed: u64, trial: u64) -> RngStream {
    RngStream::keyed(seed, vec![trial]).child(0)
}
