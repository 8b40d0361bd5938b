use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::interpret::{Direction, Labels};

#[derive(Debug, Parser)]
#[command(name = "gdid", version, about = "Group difference-in-differences estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for bootstrap and simulation (0 = one per core).
    /// Results do not depend on it.
    #[arg(long, env = "GDID_THREADS", global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the GDiD contrast with bootstrap inference.
    Estimate(EstimateArgs),
    /// Compare pre-baseline trends across groups.
    Pretrends(PretrendsArgs),
    /// Monte Carlo study on a synthetic world.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignArg {
    Auto,
    Canonical,
    Prepost,
    Nopre,
    Triple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Simple,
    Ipw,
    Continuous,
    Triple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimEstimator {
    /// Triple differences for triple worlds, the simple contrast otherwise.
    Auto,
    Simple,
    Ipw,
    Triple,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Unit identifier column; pass an empty string to use row numbers.
    #[arg(long, default_value = "unit")]
    pub unit_col: String,
    #[arg(long, default_value = "g")]
    pub group_col: String,
    #[arg(long, default_value = "a0")]
    pub a0_col: String,
    #[arg(long, default_value = "a1")]
    pub a1_col: String,
    #[arg(long, default_value = "y0")]
    pub y0_col: String,
    #[arg(long, default_value = "y1")]
    pub y1_col: String,
    /// Baseline covariate columns for the propensity model.
    #[arg(long, value_delimiter = ',')]
    pub covariates: Vec<String>,
    /// Pre-baseline outcome columns, oldest first.
    #[arg(long, value_delimiter = ',')]
    pub pre_columns: Vec<String>,
    /// Skip rows with empty mapped cells instead of failing.
    #[arg(long)]
    pub drop_incomplete: bool,
    /// Group level coded as the reference group (G = 0).
    #[arg(long)]
    pub reference: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BootArgs {
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 1999)]
    pub boot: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Confidence level of the intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Resample units without stratifying by group.
    #[arg(long)]
    pub unstratified: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LabelArgs {
    #[arg(long, default_value = "the treatment")]
    pub treatment_name: String,
    /// Defaults to "group <level>".
    #[arg(long)]
    pub group1_name: Option<String>,
    #[arg(long)]
    pub group0_name: Option<String>,
    #[arg(long, default_value = "the outcome")]
    pub outcome_name: String,
    /// Unit of the outcome, e.g. "percentage points".
    #[arg(long, default_value = "units")]
    pub unit_name: String,
    #[arg(long, default_value = "the first period")]
    pub period0_name: String,
    #[arg(long, default_value = "the second period")]
    pub period1_name: String,
    /// Direction the treatment is understood to move the outcome; frames
    /// effect-modification sentences.
    #[arg(long, value_enum, default_value_t = DirectionArg::Increase)]
    pub effect_direction: DirectionArg,
    #[arg(long, default_value_t = 2)]
    pub decimals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    Increase,
    Reduce,
}

impl LabelArgs {
    pub fn labels(&self, focal: &str, reference: &str) -> Labels {
        Labels {
            treatment_name: self.treatment_name.clone(),
            group1_name: self
                .group1_name
                .clone()
                .unwrap_or_else(|| format!("group {focal}")),
            group0_name: self
                .group0_name
                .clone()
                .unwrap_or_else(|| format!("group {reference}")),
            outcome_name: self.outcome_name.clone(),
            unit: self.unit_name.clone(),
            period0_name: self.period0_name.clone(),
            period1_name: self.period1_name.clone(),
            direction: match self.effect_direction {
                DirectionArg::Increase => Direction::Increase,
                DirectionArg::Reduce => Direction::Reduce,
            },
            decimals: self.decimals,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub boot: BootArgs,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[arg(long, value_enum, default_value_t = DesignArg::Auto)]
    pub design: DesignArg,
    /// Defaults to `triple` with `--design triple`, `simple` otherwise.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// `focal,reference` group levels, or `g,g'` values for `continuous`.
    #[arg(long, allow_hyphen_values = true)]
    pub contrast: Option<String>,
    /// `tau_l,tau_u`: asserted range of the G = 0 effect (pre-post only).
    #[arg(long, allow_hyphen_values = true)]
    pub bounds: Option<String>,
    /// Propensity trimming threshold.
    #[arg(long, default_value_t = 0.01)]
    pub trim: f64,
    /// Fail instead of dropping units outside the trimming band.
    #[arg(long)]
    pub reject_overlap: bool,
    /// Polynomial degree of the continuous-group regression.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    #[arg(long)]
    pub allow_extrapolation: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PretrendsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub boot: BootArgs,
    #[arg(long, value_enum, default_value_t = DesignArg::Auto)]
    pub design: DesignArg,
    /// `focal,reference` group levels for multi-level groups.
    #[arg(long)]
    pub contrast: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// World specification in `key = value` form.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SimEstimator::Auto)]
    pub estimator: SimEstimator,
    /// Bootstrap replicates per dataset for coverage; 0 skips coverage.
    #[arg(long, default_value_t = 0)]
    pub boot: usize,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}
