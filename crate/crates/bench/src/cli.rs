//! Command-line surface of `catsp`.

use std::path::PathBuf;
use std::str::FromStr;

use catsp_core::objective::Weights;
use catsp_core::pareto::{F1Max, DEFAULT_DELTA_MIN, DEFAULT_F1_MAX, DEFAULT_N_MAX};
use catsp_core::scoring::ScoringRule;
use catsp_core::solver::DEFAULT_ITERATIONS;
use catsp_core::{DriverPolicy, Mode};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "catsp", version, about = "Zone-contiguous route planning with driver history")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Write synthetic instances, histories and executed routes.
    Gen(GenArgs),
    /// Build a heading field from history files.
    Mine(MineArgs),
    /// Solve instances under one or more modes and score them.
    Solve(SolveArgs),
    /// Approximate the travel time / history trade-off front.
    Pareto(ParetoArgs),
    /// Score one route against a reference route.
    Score(ScoreArgs),
    /// Generate a synthetic suite and run solve (and optionally pareto) on it.
    Bench(BenchArgs),
}

/// `seconds` or `nn` for the nearest-neighbor tour time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F1MaxArg(pub F1Max);

impl FromStr for F1MaxArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("nn") {
            return Ok(F1MaxArg(F1Max::NearestNeighbor));
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(F1MaxArg(F1Max::Seconds(v))),
            _ => Err(format!("expected positive seconds or `nn`, got `{s}`")),
        }
    }
}

impl Serialize for F1MaxArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            F1Max::Seconds(v) => s.serialize_f64(v),
            F1Max::NearestNeighbor => s.serialize_str("nn"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Positional,
    Challenge,
}

impl From<Rule> for ScoringRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Positional => ScoringRule::Positional,
            Rule::Challenge => ScoringRule::Challenge,
        }
    }
}

fn parse_policy(s: &str) -> Result<DriverPolicy, String> {
    s.parse().map_err(|e: catsp_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: catsp_core::Error| e.to_string())
}

fn parse_weights(s: &str) -> Result<Weights, String> {
    s.parse().map_err(|e: catsp_core::Error| e.to_string())
}

fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn serialize_opt_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &Option<T>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

fn serialize_modes<S: serde::Serializer>(v: &[Mode], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|m| m.to_string()))
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    /// First seed; `CATSP_SEED` is used when absent.
    #[arg(long, env = "CATSP_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Number of consecutive seeds.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, default_value_t = 8)]
    pub zones: usize,
    #[arg(long, default_value_t = 5)]
    pub stops_per_zone: usize,
    /// `sweep` or `nearest`.
    #[arg(long, default_value = "sweep", value_parser = parse_policy)]
    #[serde(serialize_with = "serialize_display")]
    pub policy: DriverPolicy,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MineArgs {
    /// History files or glob patterns.
    #[arg(long, required = true, num_args = 1..)]
    pub histories: Vec<String>,
    /// Step-vector length in meters.
    #[arg(long, default_value_t = catsp_core::field::DEFAULT_BETA)]
    pub beta: f64,
    /// Distance decay per meter.
    #[arg(long, default_value_t = catsp_core::field::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Where history information comes from.
#[derive(Debug, Args, Serialize)]
pub struct HistorySource {
    /// Field file written by `mine`.
    #[arg(long, conflicts_with = "histories")]
    pub field: Option<PathBuf>,
    /// History files or glob patterns, mined on the fly.
    #[arg(long, num_args = 1..)]
    pub histories: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long, env = "CATSP_SEED", default_value_t = 1)]
    pub seed: u64,
    /// GRASP iterations per solve.
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    pub iters: usize,
    /// Objective weights `total_time,heading,angle,zone_time`.
    #[arg(long, value_parser = parse_weights)]
    #[serde(serialize_with = "serialize_opt_display")]
    pub weights: Option<Weights>,
    /// Worker threads across instances; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Record wall-clock times (outputs are then no longer byte-stable).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    /// Instance files or glob patterns. An executed route next to each
    /// instance (`X.route.json` for `X.instance.json`) is used for scoring.
    #[arg(long, required = true, num_args = 1..)]
    pub instances: Vec<String>,
    #[command(flatten)]
    pub history: HistorySource,
    /// Comma-separated: base, dm, time, visual:adc|cdc|nc|be.
    #[arg(long, default_value = "base,dm", value_delimiter = ',', value_parser = parse_mode)]
    #[serde(serialize_with = "serialize_modes")]
    pub mode: Vec<Mode>,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, value_enum, default_value_t = Rule::Positional)]
    pub scoring: Rule,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct HbsArgs {
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: usize,
    /// Seconds, or `nn` for the nearest-neighbor tour time.
    #[arg(long, default_value_t = F1MaxArg(F1Max::Seconds(DEFAULT_F1_MAX)))]
    pub f1_max: F1MaxArg,
    #[arg(long, default_value_t = DEFAULT_DELTA_MIN)]
    pub delta_min: f64,
    /// Runs per instance, seeds `seed..seed + runs`.
    #[arg(long, default_value_t = 10)]
    pub runs: u64,
}

impl std::fmt::Display for F1MaxArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            F1Max::Seconds(v) => write!(f, "{v}"),
            F1Max::NearestNeighbor => f.write_str("nn"),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ParetoArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub instances: Vec<String>,
    #[command(flatten)]
    pub history: HistorySource,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub hbs: HbsArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Planned route file.
    #[arg(long)]
    pub route: PathBuf,
    /// Executed route file.
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long, value_enum, default_value_t = Rule::Positional)]
    pub scoring: Rule,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// First instance seed.
    #[arg(long, default_value_t = 1)]
    pub first: u64,
    #[arg(long, default_value_t = 100)]
    pub count: u64,
    #[arg(long, default_value_t = 12)]
    pub zones: usize,
    #[arg(long, default_value_t = 4)]
    pub stops_per_zone: usize,
    #[arg(long, default_value = "sweep", value_parser = parse_policy)]
    #[serde(serialize_with = "serialize_display")]
    pub policy: DriverPolicy,
    #[arg(
        long,
        default_value = "base,dm,visual:adc,visual:cdc,visual:nc,visual:be",
        value_delimiter = ',',
        value_parser = parse_mode
    )]
    #[serde(serialize_with = "serialize_modes")]
    pub mode: Vec<Mode>,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Also run the front approximation on every instance.
    #[arg(long)]
    pub pareto: bool,
    #[command(flatten)]
    pub hbs: HbsArgs,
    #[arg(long, value_enum, default_value_t = Rule::Positional)]
    pub scoring: Rule,
    #[arg(long)]
    pub out: PathBuf,
}
