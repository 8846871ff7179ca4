use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid arm: {0}")]
    InvalidArm(&'static str),

    #[error("instance has no arms")]
    EmptyInstance,

    #[error("transcript entry {index} pulls arm {arm}, instance has {arms} arms")]
    InvalidTranscript { index: usize, arm: usize, arms: usize },

    #[error("at least one run is required")]
    NoRuns,

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("zero likelihood at step {step}: the ratio is undefined")]
    UndefinedRatio { step: usize },

    #[error("input is not in the hard family at level {ell}")]
    NotInFamily { ell: u32 },

    #[error("hard-family parameters put an arm mean outside (0, 1)")]
    MeanOutOfRange,

    #[error("run has {rounds} rounds but only {requested} were allowed")]
    TooManyRounds { rounds: usize, requested: usize },

    #[error("no round starts inside the window of level {ell}")]
    NoRoundForLevel { ell: u32 },

    #[error("agent {agent} out of range for {agents} agents")]
    AgentOutOfRange { agent: usize, agents: usize },
}
