//! Simulation core for regret minimization in multi-armed bandits under
//! single-agent, batched, and K-agent collaborative models.
//!
//! The crate is `no_std` (it needs `alloc`). All randomness flows through
//! [`RngStream`], which is keyed by a master seed and a path of integers so
//! that the same per-arm reward sequence can be replayed in different
//! execution models.
//!
//! Module map:
//!
//! - [`instance`], [`rng`], [`transcript`], [`regret`]: ground-truth arms,
//!   keyed randomness, pull transcripts and regret accounting.
//! - [`batched`]: successive elimination on a geometric batch grid, with the
//!   analytic round and regret bounds used to check it.
//! - [`collab`]: K-agent round-structured runs obtained by splitting each
//!   batch across agents, plus the no-communication baseline.
//! - [`lower_bound`]: the two-arm hard family, transcript likelihoods,
//!   likelihood-ratio traces, indistinguishability events and the round
//!   partition / projection constructions.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod batched;
pub mod collab;
pub mod error;
pub mod instance;
pub mod lower_bound;
mod math;
pub mod regret;
pub mod rng;
pub mod transcript;

pub use error::{Error, Result};
pub use instance::{Arm, ArmKind, Instance};
pub use regret::{expected_regret, regret_of_transcript, RegretEstimate};
pub use rng::{sample_reward, RngStream};
pub use transcript::{Entry, Transcript};
