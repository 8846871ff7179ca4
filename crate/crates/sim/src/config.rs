//! TOML experiment configuration.
//!
//! See `docs/config.md` for the full schema.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use collab_bandit_core::batched::BudgetMode;
use collab_bandit_core::lower_bound::{
    hard_input, Sign, DEFAULT_BETA, DEFAULT_EPS, DEFAULT_LAMBDA_LB, SCALED_LAMBDA_LB,
};
use collab_bandit_core::Instance;
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Batched,
    CollabReduction,
    NoCommBaseline,
    TradeoffSweep,
    LbChecks,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Batched => "batched",
            ExperimentKind::CollabReduction => "collab-reduction",
            ExperimentKind::NoCommBaseline => "no-comm-baseline",
            ExperimentKind::TradeoffSweep => "tradeoff-sweep",
            ExperimentKind::LbChecks => "lb-checks",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "batched" => ExperimentKind::Batched,
            "collab-reduction" => ExperimentKind::CollabReduction,
            "no-comm-baseline" => ExperimentKind::NoCommBaseline,
            "tradeoff-sweep" => ExperimentKind::TradeoffSweep,
            "lb-checks" => ExperimentKind::LbChecks,
            other => bail!("unknown experiment kind `{other}`"),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignSpec {
    Plus,
    Minus,
    /// Both `I_ℓ^+` and `I_ℓ^−`.
    Pair,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetSpec {
    #[default]
    GlobalCap,
    PerArmGrid,
}

impl From<BudgetSpec> for BudgetMode {
    fn from(spec: BudgetSpec) -> Self {
        match spec {
            BudgetSpec::GlobalCap => BudgetMode::GlobalCap,
            BudgetSpec::PerArmGrid => BudgetMode::PerArmGrid,
        }
    }
}

/// Either explicit Bernoulli means or a level of the hard family.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub means: Option<Vec<f64>>,
    pub level: Option<u32>,
    pub sign: Option<SignSpec>,
}

impl InstanceSpec {
    /// Labelled instances, in the order they are simulated.
    pub fn resolve(&self, beta: f64) -> Result<Vec<(String, Instance)>> {
        match (&self.means, self.level) {
            (Some(means), None) => {
                if self.sign.is_some() {
                    bail!("instance.sign only applies to hard-family levels");
                }
                let label = means.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(";");
                Ok(vec![(label, Instance::bernoulli(means)?)])
            }
            (None, Some(level)) => {
                if level == 0 {
                    bail!("instance.level starts at 1");
                }
                let signs: &[Sign] = match self.sign.unwrap_or(SignSpec::Plus) {
                    SignSpec::Plus => &[Sign::Plus],
                    SignSpec::Minus => &[Sign::Minus],
                    SignSpec::Pair => &[Sign::Plus, Sign::Minus],
                };
                signs
                    .iter()
                    .map(|&s| Ok((format!("I{level}{}", s.symbol()), hard_input(level, s, beta)?)))
                    .collect()
            }
            (Some(_), Some(_)) => bail!("instance: give either `means` or `level`, not both"),
            (None, None) => bail!("instance: one of `means` or `level` is required"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LowerBoundSpec {
    pub beta: f64,
    pub eps: f64,
    pub lambda_lb: f64,
    /// `lambda_lb` used by the event-`E` Monte Carlo.
    pub scaled_lambda_lb: f64,
    /// Levels covered by the exhaustive per-step and drift checks.
    pub max_level: u32,
    /// Numerator `c` of the per-step bound `c/β^ℓ`.
    pub step_numerator: f64,
    /// Numerator `c` of the drift bound `c/β^{2ℓ}`.
    pub drift_numerator: f64,
    /// Simulated collaborative runs for the round-partition checks.
    pub partition_runs: u64,
    /// Transcripts per level for the event-`E` Monte Carlo.
    pub mc_trials: u64,
    /// Levels whose qualifying length exceeds this are skipped by the
    /// Monte Carlo.
    pub mc_max_length: u64,
}

impl Default for LowerBoundSpec {
    fn default() -> Self {
        Self {
            beta: DEFAULT_BETA,
            eps: DEFAULT_EPS,
            lambda_lb: DEFAULT_LAMBDA_LB,
            scaled_lambda_lb: SCALED_LAMBDA_LB,
            max_level: 6,
            step_numerator: 5.0,
            drift_numerator: 11.0,
            partition_runs: 1000,
            mc_trials: 100_000,
            mc_max_length: 10_000,
        }
    }
}

fn default_confidence() -> f64 {
    0.99
}

fn default_agents() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub trials: u64,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub instance: InstanceSpec,
    #[serde(default = "default_agents")]
    pub agents: usize,
    /// Per-agent horizon `T`.
    pub horizon: u64,
    pub lambda_grid: Option<f64>,
    /// Round counts for `tradeoff-sweep`; `lambda_grid = (KT)^{1/R}`.
    #[serde(default)]
    pub rounds: Vec<u32>,
    #[serde(default)]
    pub budget_mode: BudgetSpec,
    #[serde(default)]
    pub lb: LowerBoundSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            bail!("confidence must lie in (0, 1)");
        }
        if self.agents == 0 || self.horizon == 0 {
            bail!("agents and horizon must be at least 1");
        }
        match self.experiment {
            ExperimentKind::TradeoffSweep => {
                if self.rounds.is_empty() {
                    bail!("tradeoff-sweep needs a nonempty `rounds` grid");
                }
                if self.lambda_grid.is_some() {
                    bail!("tradeoff-sweep derives lambda_grid from `rounds`; remove `lambda_grid`");
                }
                if self.rounds.contains(&0) {
                    bail!("rounds must be at least 1");
                }
            }
            ExperimentKind::LbChecks => {}
            _ => {
                if self.lambda_grid.is_none() {
                    bail!("{} needs `lambda_grid`", self.experiment);
                }
            }
        }
        if self.experiment != ExperimentKind::LbChecks {
            self.instances()?;
        }
        Ok(())
    }

    pub fn instances(&self) -> Result<Vec<(String, Instance)>> {
        self.instance.resolve(self.lb.beta)
    }
}
