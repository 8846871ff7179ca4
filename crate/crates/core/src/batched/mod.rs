//! Batched successive elimination on a geometric grid.
//!
//! [`SuccessiveElimination`] holds the decision logic and never sees the
//! arms: it emits a [`BatchPlan`], receives the rewards in plan order and
//! decides which arms survive. [`run_batched_mab`] executes the plans with a
//! single agent; the collaborative reduction in [`crate::collab`] executes
//! the same plans split across agents.

mod bounds;
mod config;
mod run;
mod schedule;

pub use bounds::{analytic_regret_bound, analytic_round_bound, confidence_log_term, elimination_deadline};
pub use config::{batch_grid, BatchConfig, BudgetMode};
pub use run::{run_batched_mab, BatchRecord, BatchRun, EliminationCertificate};
pub use schedule::{BatchKind, BatchPlan, SuccessiveElimination};
