//! Command-line arguments.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::format::PowerKindJson;

#[derive(Debug, Parser)]
#[command(
    name = "dmac",
    version,
    about = "Joint triangularization, dirty MAC rate bounds and lattice simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor one matrix (qr, svd, gmd) or two matrices jointly (jet,
    /// jet_left) and verify the factors.
    Decompose(DecomposeArgs),
    /// Capacities and dirty MAC rate bounds of a rate instance.
    Rates(RatesArgs),
    /// Two-way relay rate table for a scenario.
    Twrc(TwrcArgs),
    /// Monte Carlo run of a transmission scheme.
    Sim(SimArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecomposeKind {
    Qr,
    Svd,
    Gmd,
    /// Shared right factor: `A_k = U_k·T_k·Vᵀ` (tall inputs).
    Jet,
    /// Shared left factor: `H_k = U·T_k·V_kᵀ` (proper inputs).
    #[value(name = "jet_left")]
    JetLeft,
}

impl DecomposeKind {
    pub fn name(self) -> &'static str {
        match self {
            DecomposeKind::Qr => "qr",
            DecomposeKind::Svd => "svd",
            DecomposeKind::Gmd => "gmd",
            DecomposeKind::Jet => "jet",
            DecomposeKind::JetLeft => "jet_left",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// `min:max:points`, geometric spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, points] = parts[..] else {
            return Err("expected min:max:points".into());
        };
        let min: f64 = min.parse().map_err(|e| format!("min: {e}"))?;
        let max: f64 = max.parse().map_err(|e| format!("max: {e}"))?;
        let points: usize = points.parse().map_err(|e| format!("points: {e}"))?;
        if !(min > 0.0 && min < max && max.is_finite()) {
            return Err("need 0 < min < max < inf".into());
        }
        if points < 2 {
            return Err("need at least two points".into());
        }
        Ok(Self { min, max, points })
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be positive and finite".into())
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long, value_enum)]
    pub kind: DecomposeKind,
    /// Matrix JSON files: one for qr, svd and gmd, two for jet and jet_left.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Directory receiving the factor files and `report.json`.
    #[arg(long)]
    pub output: PathBuf,
    /// Reconstruction and diagonal tolerance.
    #[arg(long, value_parser = positive)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Rate instance JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Use this power for every user instead of the instance's powers.
    #[arg(long, value_parser = positive)]
    pub power: Option<f64>,
    #[arg(long, value_enum)]
    pub power_kind: Option<PowerKindJson>,
    /// Channel uses of the time extension (three or more users).
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Evaluate at every power of a geometric grid.
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TwrcArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = positive)]
    pub power: Option<f64>,
    #[arg(long, value_enum)]
    pub power_kind: Option<PowerKindJson>,
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Simulation config JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Overrides the config's trial count.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Report file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
