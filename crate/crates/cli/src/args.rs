//! Command-line and config-file arguments. The same structs back both, so a
//! TOML config is just the flags of one subcommand under its own table.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

pub const DEFAULT_PREC: u32 = 256;

#[derive(Debug, Parser)]
#[command(name = "ratquad", version, about = "Rational Gaussian and orthogonal quadrature on [-1, 1]")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct Global {
    /// Working precision in bits.
    #[arg(long, global = true)]
    pub prec: Option<u32>,

    /// Target relative tolerance (default: 1e-30, or just above the floor
    /// for the chosen precision).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// How many times the precision may be doubled before giving up.
    #[arg(long, global = true)]
    pub escalations: Option<u32>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one rule and export it with its exactness residuals.
    Rule(RuleArgs),
    /// Reproduce one of the relative-error tables (1 prints nodes/weights).
    Table(TableArgs),
    /// Run the randomized property suites.
    Props(PropsArgs),
    /// Compare node distributions with their limit density.
    Dist(DistArgs),
    /// Apply a rule to a registered integrand.
    Integrate(IntegrateArgs),
    /// Run a command described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn default_params() -> String {
    "sqrt".into()
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleArgs {
    /// gr, or or gl.
    #[arg(long)]
    pub kind: String,

    #[arg(long)]
    pub n: usize,

    /// Parameter generator: sqrt, ladder:M, poles:W[:zero|:nozero],
    /// conv:A:S, list:T1,T2,... or file:PATH.json.
    #[arg(long, default_value = "sqrt")]
    #[serde(default = "default_params")]
    pub params: String,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    #[serde(default)]
    pub format: Format,

    /// Sixteen decimals, laid out for comparison with the published table.
    #[arg(long)]
    #[serde(default)]
    pub table1: bool,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableArgs {
    /// 1 to 5.
    pub which: u8,

    /// Override the list of n values.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub ns: Option<Vec<usize>>,

    /// Override the list of ω values (tables 2, 4, 5).
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub omegas: Option<Vec<f64>>,

    /// Plain scientific notation instead of mantissa(exponent).
    #[arg(long)]
    #[serde(default)]
    pub sci: bool,
}

fn default_suite() -> String {
    "all".into()
}
fn default_trials() -> usize {
    50
}
fn default_seed() -> u64 {
    ratquad::analysis::suites::DEFAULT_SEED
}
fn default_max_n() -> usize {
    8
}
fn default_k() -> usize {
    100
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropsArgs {
    /// all, interlacing, monotonicity, extreme-weights, weight-sum,
    /// exactness, oracle or denseness.
    #[arg(long, default_value = "all")]
    #[serde(default = "default_suite")]
    pub suite: String,

    #[arg(long, default_value_t = default_trials())]
    #[serde(default = "default_trials")]
    pub trials: usize,

    #[arg(long, default_value_t = default_seed())]
    #[serde(default = "default_seed")]
    pub seed: u64,

    #[arg(long, default_value_t = default_max_n())]
    #[serde(default = "default_max_n")]
    pub max_n: usize,

    /// Generators for the denseness check; repeatable.
    #[arg(long = "gen")]
    #[serde(default)]
    pub gens: Vec<String>,

    /// Number of partial sums in the denseness check.
    #[arg(long, default_value_t = default_k())]
    #[serde(default = "default_k")]
    pub k: usize,
}

fn default_dist_gen() -> String {
    "conv:0.5:0.3".into()
}
fn default_dist_kind() -> String {
    "gr".into()
}
fn default_ns() -> Vec<usize> {
    vec![10, 20, 40, 80]
}
fn default_grid() -> usize {
    41
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistArgs {
    /// Parameter generator with a limit: conv:A:S, sqrt or poles:W.
    #[arg(long = "gen", default_value = "conv:0.5:0.3")]
    #[serde(default = "default_dist_gen", rename = "gen")]
    pub generator: String,

    /// gr, or or gl (gl is compared with the arcsin law).
    #[arg(long, default_value = "gr")]
    #[serde(default = "default_dist_kind")]
    pub kind: String,

    #[arg(long, value_delimiter = ',', default_values_t = default_ns())]
    #[serde(default = "default_ns")]
    pub ns: Vec<usize>,

    /// Points at which the model density is sampled.
    #[arg(long, default_value_t = default_grid())]
    #[serde(default = "default_grid")]
    pub grid: usize,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateArgs {
    /// i1:W, i2, i3:W or i4:W.
    #[arg(long)]
    pub integrand: String,

    #[arg(long)]
    pub kind: String,

    #[arg(long)]
    pub n: usize,

    #[arg(long, default_value = "sqrt")]
    #[serde(default = "default_params")]
    pub params: String,
}

/// A config file: global settings plus exactly one command table.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub prec: Option<u32>,
    pub tol: Option<f64>,
    pub escalations: Option<u32>,
    pub out: Option<PathBuf>,
    pub rule: Option<RuleArgs>,
    pub table: Option<TableArgs>,
    pub props: Option<PropsArgs>,
    pub dist: Option<DistArgs>,
    pub integrate: Option<IntegrateArgs>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<(Global, Command), String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        let global = Global {
            prec: cfg.prec,
            tol: cfg.tol,
            escalations: cfg.escalations,
            out: cfg.out,
        };
        let mut commands = Vec::new();
        if let Some(a) = cfg.rule {
            commands.push(Command::Rule(a));
        }
        if let Some(a) = cfg.table {
            commands.push(Command::Table(a));
        }
        if let Some(a) = cfg.props {
            commands.push(Command::Props(a));
        }
        if let Some(a) = cfg.dist {
            commands.push(Command::Dist(a));
        }
        if let Some(a) = cfg.integrate {
            commands.push(Command::Integrate(a));
        }
        match commands.len() {
            1 => Ok((global, commands.pop().expect("one command"))),
            0 => Err("config names no command; add one of [rule], [table], [props], [dist], [integrate]".into()),
            _ => Err("config names more than one command".into()),
        }
    }
}
