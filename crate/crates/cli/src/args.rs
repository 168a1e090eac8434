use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::record::Mode;

#[derive(Debug, Parser)]
#[command(
    name = "spansim",
    version,
    about = "Spanner construction and LOCAL-model simulation experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph in the text format.
    Gen(GenArgs),
    /// Build and verify one spanner.
    Run(RunArgs),
    /// Run a parameter grid and write one row per run.
    Sweep(SweepArgs),
    /// t-local broadcast over a saved spanner.
    Broadcast(BroadcastArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Gnp,
    Complete,
    Cycle,
    Path,
    Grid,
    Star,
    Barbell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A number or `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Auto<T> {
    Auto,
    Value(T),
}

impl<T: FromStr> FromStr for Auto<T>
where
    T::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            Ok(Auto::Auto)
        } else {
            s.parse()
                .map(Auto::Value)
                .map_err(|e| format!("expected a number or 'auto': {e}"))
        }
    }
}

impl<T: Copy> Auto<T> {
    pub fn resolve(self, auto: impl FnOnce() -> T) -> T {
        match self {
            Auto::Auto => auto(),
            Auto::Value(v) => v,
        }
    }
}

/// `ceil(log2 n)`, at least 1.
pub fn auto_h(n: usize) -> u32 {
    ((n.max(2) as f64).log2().ceil() as u32).max(1)
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Node count (gnp, complete, cycle, path, star).
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability (gnp).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long)]
    pub clique: Option<usize>,
    #[arg(long)]
    pub bridge: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Trial parameter; `auto` is ceil(log2 n).
    #[arg(long, default_value = "auto")]
    pub h: Auto<u32>,
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Centralized)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1.0)]
    pub budget_scale: f64,
    /// Stretch bound to verify against; `auto` is 2 * 3^k - 1.
    #[arg(long, default_value = "auto")]
    pub stretch_bound: Auto<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the spanner edges for a later `broadcast`.
    #[arg(long)]
    pub spanner_out: Option<PathBuf>,
    /// Include wall-clock time in the record.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Node counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Edge probability for gnp.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub k: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "auto")]
    pub h: Vec<Auto<u32>>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub c: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub budget_scale: Vec<f64>,
    /// Sampler seeds 0..seeds per graph.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub graph_seed: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "centralized")]
    pub mode: Vec<Mode>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct BroadcastArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Spanner record written by `run --spanner-out`.
    #[arg(long)]
    pub spanner: PathBuf,
    #[arg(long)]
    pub t: u32,
    /// Flooding depth multiplier; `auto` is the spanner's stretch bound.
    #[arg(long, default_value = "auto")]
    pub alpha: Auto<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
