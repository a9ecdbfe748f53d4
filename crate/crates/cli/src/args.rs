use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{Detector, GridOverrides, Method};

#[derive(Debug, Parser)]
#[command(
    name = "qibench",
    version,
    about = "Coherent-state quantum illumination benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chernoff-type error bounds of each scenario.
    Bound(BoundArgs),
    /// ROC curves as CSV.
    Roc(RocArgs),
    /// Regenerates the data of a figure panel (or `fig2`, `fig3`, `fig4`, `all`).
    Figure(FigureArgs),
    /// Runs the oracle-equivalence and limit-recovery suites.
    Validate(ValidateArgs),
}

/// Where scenarios come from.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Scenario JSON file (`"schema": 1`).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Use the scenarios of a figure panel instead.
    #[arg(long)]
    pub figure: Option<String>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Smallest false-alarm probability.
    #[arg(long)]
    pub grid_min: Option<f64>,
    /// Largest false-alarm probability.
    #[arg(long)]
    pub grid_max: Option<f64>,
    /// Number of log-spaced grid points.
    #[arg(long)]
    pub grid_points: Option<usize>,
}

impl GridArgs {
    pub fn overrides(&self) -> GridOverrides {
        GridOverrides {
            min: self.grid_min,
            max: self.grid_max,
            points: self.grid_points,
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value = "both")]
    pub method: Method,
    /// Also write `report.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RocArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value = "optimal")]
    pub detector: Detector,
    /// `oracle` means the general formulas for the optimal detector and
    /// Monte Carlo for homodyne.
    #[arg(long, value_enum, default_value = "closed")]
    pub method: Method,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Monte Carlo samples per hypothesis.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Write `roc.csv` and `report.json` here instead of printing the CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    pub id: String,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: Method,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Number of oracle cases to use (default: the full grid).
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Multiplies every closed-form value; for fault-injection tests.
    #[arg(long, default_value_t = 1.0, hide = true)]
    pub closed_form_scale: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
