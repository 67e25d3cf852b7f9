//! `isocorr`: runs the isotropic-correlation experiments on return panels and
//! writes every table and figure series as CSV/JSON under one run directory.

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod output;

pub const DEFAULT_SEED: u64 = 20_241_001;

#[derive(Parser, Debug)]
#[command(
    name = "isocorr",
    version,
    about = "Isotropic correlation models for equity cross-sections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a canonical price CSV, drop incomplete assets and write returns.
    Ingest(IngestArgs),
    /// Random pair correlations, Fisher-Z histogram and KS test.
    Pairs(PairsArgs),
    /// Randomized N*(N) experiment, large-N fit and model verdict.
    Ndof(NdofArgs),
    /// Mean-variance or Laplace allocation under an isotropic covariance.
    Allocate(AllocateArgs),
    /// Risk-split, centering and N* curves over a correlation grid.
    Curves(CurvesArgs),
    /// Write a seeded synthetic panel.
    Synth(SynthArgs),
    /// Dump dense G, Q and G^-1 for inspection.
    Dense(DenseArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct IngestArgs {
    /// Canonical price CSV (`date,asset_id,adjusted_close`).
    #[arg(long)]
    pub input: PathBuf,
    /// Run directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Minimum fraction of dates an asset must cover to be kept.
    #[arg(long, default_value_t = 0.95)]
    pub min_coverage: f64,
    /// First date kept (inclusive).
    #[arg(long)]
    pub from: Option<NaiveDate>,
    /// Last date kept (inclusive).
    #[arg(long)]
    pub to: Option<NaiveDate>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RefMean {
    Sample,
    Scaled,
}

#[derive(Args, Debug, Serialize)]
pub struct PairsArgs {
    /// Returns CSV, or a complete canonical price CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 5000)]
    pub trials: usize,
    /// Mean of the reference Normal for the Fisher-Z comparison.
    #[arg(long, value_enum, default_value_t = RefMean::Sample)]
    pub ref_mean: RefMean,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct NdofArgs {
    /// Returns CSV, or a complete canonical price CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Lower end of the large-N fit window (default ceil(0.6 N_max)).
    #[arg(long)]
    pub fit_min: Option<usize>,
    /// Upper end of the large-N fit window (default N_max).
    #[arg(long)]
    pub fit_max: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Mvo,
    Laplace,
}

#[derive(Args, Debug, Serialize)]
pub struct AllocateArgs {
    /// Alpha CSV with header `asset_id,alpha,sigma`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Common correlation.
    #[arg(long, allow_negative_numbers = true)]
    pub rho: f64,
    /// Risk-aversion multiplier.
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = Model::Mvo)]
    pub model: Model,
}

#[derive(Args, Debug, Serialize)]
pub struct CurvesArgs {
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Correlation grid, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = vec![0.1, 0.25, 0.5, 0.75])]
    pub rho: Vec<f64>,
    /// Curves run over N = 1..=n-max.
    #[arg(long, default_value_t = 500)]
    pub n_max: usize,
    /// Per-asset volatility for the risk split.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthFormat {
    Returns,
    Prices,
}

#[derive(Args, Debug, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    /// Common correlation (ignored with --factors).
    #[arg(long, default_value_t = 0.13)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    /// Uniform-loadings factor model with this many factors.
    #[arg(long)]
    pub factors: Option<usize>,
    /// Common loading for --factors.
    #[arg(long, default_value_t = 0.004)]
    pub loading: f64,
    /// Idiosyncratic volatility for --factors.
    #[arg(long, default_value_t = 0.015)]
    pub idio: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SynthFormat::Returns)]
    pub format: SynthFormat,
}

#[derive(Args, Debug, Serialize)]
pub struct DenseArgs {
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Pairs(a) => commands::pairs(a),
        Command::Ndof(a) => commands::ndof(a),
        Command::Allocate(a) => commands::allocate(a),
        Command::Curves(a) => commands::curves(a),
        Command::Synth(a) => commands::synth(a),
        Command::Dense(a) => commands::dense(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
