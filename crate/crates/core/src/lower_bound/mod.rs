//! Constructions behind the round/regret lower bound for two-arm bandits.
//!
//! Everything here is a pure function of its inputs. Likelihoods use
//! natural logs; `L`, `α` and the event-`E` length threshold use base 2.

mod drift;
mod events;
mod family;
mod likelihood;
mod projection;
mod rounds;

pub use drift::{
    drift_bound_check, exhaustive_drift_check, exhaustive_step_check, ArmDrift, DriftViolation, ExhaustiveReport,
    StepViolation,
};
pub use events::{azuma_tail_bound, event_e_check, EventECheck, EventWitness};
pub use family::{
    hard_input, make_hard_family, HardFamily, Sign, DEFAULT_BETA, DEFAULT_EPS, DEFAULT_LAMBDA_LB, SCALED_LAMBDA_LB,
};
pub use likelihood::{llr_trace, step_log_ratio, transcript_likelihood, Likelihood, LikelihoodTrace};
pub use projection::{paired_regret_lower, project_transcript, PairedRegret, Projection};
pub use rounds::{
    level_cap_precondition, level_of_time, r_range_holds, round_index_report, tau, zeta, LevelIndex, RoundIndexReport,
};
