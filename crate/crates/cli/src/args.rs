use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "recurconnect", version, about = "Recurrence-based connectivity between time series")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sliding-window CPR and ρ for every pair, plus per-window bin counts.
    Trends(TrendsArgs),
    /// CPR and ρ in windows around the aligned maxima of two series.
    Peak(PeakArgs),
    /// Write a synthetic series.
    Synth(SynthArgs),
    /// Recurrence plot, p(τ), ACF and auto mutual information of one series.
    Diagnose(DiagnoseArgs),
}

/// Analysis parameters shared by the data commands. Unset values fall back
/// to the config file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file supplying any of these options.
    #[arg(long, env = "RECURCONNECT_CONFIG")]
    pub config: Option<PathBuf>,

    #[arg(long, env = "RECURCONNECT_WINDOW")]
    pub window: Option<usize>,

    #[arg(long, env = "RECURCONNECT_STEP")]
    pub step: Option<usize>,

    /// Recurrence threshold on the normalized series.
    #[arg(long, env = "RECURCONNECT_EPSILON")]
    pub epsilon: Option<f64>,

    #[arg(long, env = "RECURCONNECT_SURROGATES")]
    pub surrogates: Option<usize>,

    #[arg(long, env = "RECURCONNECT_ALPHA")]
    pub alpha: Option<f64>,

    #[arg(long, env = "RECURCONNECT_STRONG")]
    pub strong: Option<f64>,

    #[arg(long, env = "RECURCONNECT_MODERATE")]
    pub moderate: Option<f64>,

    #[arg(long, env = "RECURCONNECT_SEED")]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long, env = "RECURCONNECT_OUT")]
    pub out: Option<PathBuf>,

    /// Worker threads (default: one per core).
    #[arg(long, env = "RECURCONNECT_WORKERS")]
    pub workers: Option<usize>,

    /// Profiles run to floor(fraction * (window - 1)).
    #[arg(long, env = "RECURCONNECT_TAU_MAX_FRACTION")]
    pub tau_max_fraction: Option<f64>,

    /// Also test against surrogates of the first series; keep the larger p.
    #[arg(long, env = "RECURCONNECT_SYMMETRIC", num_args = 0..=1, default_missing_value = "true")]
    pub symmetric: Option<bool>,
}

#[derive(Debug, Clone, Args)]
pub struct TrendsArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// CSV files with `date` and `close` columns.
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PeakArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// First day of the peak search interval.
    #[arg(long, env = "RECURCONNECT_FROM")]
    pub from: Option<NaiveDate>,

    /// Last day of the peak search interval.
    #[arg(long, env = "RECURCONNECT_TO")]
    pub to: Option<NaiveDate>,

    /// Exactly two CSV files.
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(subcommand)]
    pub kind: SynthKind,

    #[arg(long, env = "RECURCONNECT_SEED", default_value_t = 0, global = true)]
    pub seed: u64,

    #[arg(long, env = "RECURCONNECT_OUT", default_value = "recurconnect_out", global = true)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Subcommand)]
pub enum SynthKind {
    /// Uniform white noise on [0, 1).
    White {
        #[arg(long, default_value_t = 2000)]
        n: usize,
    },
    /// RK4 Lorenz trajectory.
    Lorenz(LorenzArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LorenzArgs {
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub transient: usize,
    /// Start from β = 8/3 instead of 10/3.
    #[arg(long)]
    pub classic: bool,
    /// Write one coordinate as a `date,close` series instead of all three.
    #[arg(long, value_enum)]
    pub component: Option<Component>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Component {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Index of the first point to analyse.
    #[arg(long, default_value_t = 0)]
    pub start: usize,

    /// Number of points to analyse (default: to the end).
    #[arg(long)]
    pub length: Option<usize>,

    /// Largest lag for the auto mutual information.
    #[arg(long, default_value_t = 100)]
    pub mi_lags: usize,

    /// Also write p(τ) at ε = 1%, 2% and 3% of the maximum distance.
    #[arg(long)]
    pub sweep: bool,

    pub input: PathBuf,
}
