//! Command-line arguments.
//!
//! Argument structs double as the config echo of every JSON report, so they
//! serialize alongside the values resolved at run time.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use volcp_core::Preset;

#[derive(Debug, Parser)]
#[command(
    name = "volcp",
    version,
    about = "Volatility change-point tests, estimators and simulations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Run the parametric, local and/or global tests on one series.
    Test(TestArgs),
    /// Locate volatility jumps with sequential top-down detection.
    Estimate(EstimateArgs),
    /// Simulate a scenario preset and write its log-price path.
    Simulate(SimulateArgs),
    /// Size/power study over many simulated paths.
    Montecarlo(MonteCarloArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stat {
    Local,
    Global,
    Parametric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalModeArg {
    /// Bootstrap of the cusum of spot-quarticity-standardized statistics.
    Bootstrap,
    /// Standardized statistic against the Kolmogorov-Smirnov law.
    Standardized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

pub fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse::<Preset>().map_err(|e| e.to_string())
}

/// Where the series comes from: a CSV file or a simulated preset.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "scenario"])))]
pub struct SourceArgs {
    /// CSV file with header `time,price` or `time,logprice`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Scenario preset: sv-null, sv-jump, fou-null, fou-jump, global-null, global-alt.
    #[arg(long, value_parser = parse_preset)]
    pub scenario: Option<Preset>,
    /// Number of increments of a simulated path.
    #[arg(long = "n", default_value_t = 10_000, conflicts_with = "input")]
    pub n: usize,
    /// Volatility-jump size for the jump presets.
    #[arg(long, conflicts_with = "input")]
    pub jump_size: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TruncArgs {
    /// Truncation constant C in u = C sqrt(2 ln n / n).
    #[arg(long = "trunc-c", conflicts_with = "trunc_u")]
    pub trunc_c: Option<f64>,
    /// Explicit truncation level u.
    #[arg(long = "trunc-u")]
    pub trunc_u: Option<f64>,
    /// Declare that the price has jumps; an explicit truncation rule is then required.
    #[arg(long)]
    pub jumps: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Seed for simulation and bootstrap (falls back to VOLCP_SEED).
    #[arg(long, env = "VOLCP_SEED")]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TestArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = Stat::Local)]
    pub stat: Stat,
    /// Run the parametric, local and global tests together.
    #[arg(long)]
    pub all: bool,
    /// Block length k (default floor(sqrt n)).
    #[arg(long = "k")]
    pub k: Option<usize>,
    /// Spot-volatility window K of the global test (default floor(sqrt n)).
    #[arg(long = "K")]
    pub spot_window: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// Bootstrap replications; for the local test this switches to the wild bootstrap.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long, value_enum, default_value_t = GlobalModeArg::Bootstrap)]
    pub global_mode: GlobalModeArg,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Block length k of the scan statistic (default floor(sqrt n)).
    #[arg(long = "k")]
    pub k: Option<usize>,
    /// Separation radius r (default 4k).
    #[arg(long = "r")]
    pub r: Option<usize>,
    /// Hölder regularity a of the volatility between jumps.
    #[arg(long = "a", default_value_t = 0.5)]
    pub a: f64,
    /// Hölder constant L.
    #[arg(long = "L", default_value_t = 1.0)]
    pub l: f64,
    #[arg(long = "c-diamond", default_value_t = 2.1)]
    pub c_diamond: f64,
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_preset)]
    pub scenario: Preset,
    #[arg(long = "n", default_value_t = 10_000)]
    pub n: usize,
    #[arg(long)]
    pub jump_size: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MonteCarloArgs {
    #[arg(long, value_parser = parse_preset)]
    pub scenario: Preset,
    #[arg(long = "n", default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Block length k (default floor(sqrt n)).
    #[arg(long = "k")]
    pub k: Option<usize>,
    /// Spot-volatility window K (default floor(sqrt n)).
    #[arg(long = "K")]
    pub spot_window: Option<usize>,
    /// Comma-separated test levels (default 0.01,0.05,0.10).
    #[arg(long, value_delimiter = ',')]
    pub level: Vec<f64>,
    /// Bootstrap replications per run (0 disables the bootstrap).
    #[arg(long, default_value_t = 0)]
    pub bootstrap: usize,
    #[arg(long)]
    pub jump_size: Option<f64>,
    #[command(flatten)]
    pub trunc: TruncArgs,
    /// ECDF table path for CSV output (default: `<out stem>_ecdf.csv`).
    #[arg(long)]
    pub ecdf_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Test(a) => &a.output,
            Command::Estimate(a) => &a.output,
            Command::Simulate(a) => &a.output,
            Command::Montecarlo(a) => &a.output,
        }
    }
}
