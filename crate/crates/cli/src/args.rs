use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use corrsv::data::InputMode;
use corrsv::ModelKind;

#[derive(Debug, Parser)]
#[command(name = "corrsv", version, about = "Correlated-error stochastic volatility toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate return/volatility paths to CSV.
    Simulate(SimulateArgs),
    /// Closed-form moments and lead-lag profile as JSON.
    Moments(MomentsArgs),
    /// Closed form against Monte Carlo over the parameter grid.
    Verify(VerifyArgs),
    /// Fit a model by MCMC.
    Fit(FitArgs),
    /// Goodness-of-fit report for one fit.
    Gof(GofArgs),
    /// Combined posterior and goodness-of-fit tables for up to three fits.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Svm0,
    Svmrho,
    Svmrhomu,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Svm0 => ModelKind::Classical,
            Model::Svmrho => ModelKind::Correlated,
            Model::Svmrhomu => ModelKind::MeanCorrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Prices,
    Returns,
}

impl From<Mode> for InputMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Prices => InputMode::Prices,
            Mode::Returns => InputMode::Returns,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Cap on worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, value_enum, default_value = "svmrhomu")]
    pub model: Model,
    #[arg(long, default_value_t = -7.88, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.96, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 0.18)]
    pub sigma: f64,
    /// Ignored (forced to 0) for svm0.
    #[arg(long, default_value_t = 0.105, allow_negative_numbers = true)]
    pub rho: f64,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV with `date,price` or `date,return` columns.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "returns")]
    pub mode: Mode,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub n_paths: usize,
    #[arg(long, default_value_t = 1000)]
    pub horizon: usize,
    /// Start every path at this `h_0` instead of the stationary law.
    #[arg(long, allow_negative_numbers = true)]
    pub h0: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Largest lead/lag offset.
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Draws per estimate.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    /// Draws for the fourth moment at persistent points.
    #[arg(long, default_value_t = 10_000_000)]
    pub n_mu4: usize,
    /// Tolerance in standard errors.
    #[arg(long, default_value_t = 4.0)]
    pub n_se: f64,
    /// Plain Monte Carlo for the higher moments instead of tilting.
    #[arg(long)]
    pub plain: bool,
    /// Only the first N grid points.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// TOML file with `[priors]` and `[chain]` tables.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Total iterations including burn-in.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burn: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "svmrhomu")]
    pub model: Model,
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GofArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: InputArgs,
    /// Directory written by `fit`.
    #[arg(long)]
    pub fit: PathBuf,
    /// Lead-lag offsets (negative = lag).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = corrsv::gof::DEFAULT_LAGS)]
    pub lags: Vec<i64>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: InputArgs,
    /// Fit directories (one to three), repeated.
    #[arg(long = "fit", required = true, num_args = 1)]
    pub fits: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = corrsv::gof::DEFAULT_LAGS)]
    pub lags: Vec<i64>,
}
