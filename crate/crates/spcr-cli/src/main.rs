//! Command-line front end of the supervised principal component regression
//! toolkit: rank variables, select component counts, fit and apply models,
//! sweep subset sizes, generate benchmark datasets, and run replicated
//! benchmark experiments.

mod commands;
mod io;
mod model;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Failures grouped by exit code: 2 usage, 3 ingest/schema, 4 numerical.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Ingest(String),
    Numerical(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Ingest(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Ingest(msg) | CliError::Numerical(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl From<spcr::Error> for CliError {
    fn from(e: spcr::Error) -> Self {
        match e {
            spcr::Error::InvalidArgument(_) | spcr::Error::UnsupportedResponse(_) => {
                CliError::Usage(e.to_string())
            }
            spcr::Error::InvalidData(_) => CliError::Ingest(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Ingest(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Ingest(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Ingest(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "spcr",
    version,
    about = "Supervised principal component regression toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank predictor variables by their association with the response
    Rank(RankArgs),
    /// Select the number of components for a ranked subset
    SelectDim(SelectDimArgs),
    /// Fit a regression model and persist it
    Fit(FitArgs),
    /// Apply a persisted model to new predictors
    Predict(PredictArgs),
    /// Evaluate methods over a range of subset sizes
    Sweep(SweepArgs),
    /// Generate benchmark simulation datasets
    Simulate(SimulateArgs),
    /// Run a replicated benchmark experiment end to end
    Bench(BenchArgs),
}

#[derive(Args)]
pub struct RankArgs {
    /// Predictor CSV (header row required)
    #[arg(long)]
    pub x: PathBuf,
    /// Response CSV (header row required)
    #[arg(long)]
    pub y: PathBuf,
    /// Method tag; repeat to compare rankings (default: knb1-pcH)
    #[arg(long = "method")]
    pub methods: Vec<String>,
    /// Report the overlap of the schemes' top-N lists
    #[arg(long, default_value_t = 50)]
    pub overlap_top: usize,
    /// Block preranking for very wide data, as L,s,tau[,scheme]
    #[arg(long)]
    pub tau_prerank: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output root; every run creates a fresh subdirectory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SelectDimArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    /// Method tag supplying the ranking scheme
    #[arg(long, default_value = "knb1-pcH")]
    pub method: String,
    /// Number of top-ranked variables to keep
    #[arg(long)]
    pub m: usize,
    /// Override table for the Gaussian-maximum adjustment (lines of `k value`)
    #[arg(long)]
    pub ub_table: Option<PathBuf>,
    #[arg(long)]
    pub tau_prerank: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct FitArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, default_value = "knb1-pcH")]
    pub method: String,
    /// Number of top-ranked variables to keep
    #[arg(long)]
    pub m: usize,
    /// Component count: `auto` or a fixed positive integer
    #[arg(long, default_value = "auto")]
    pub h: String,
    #[arg(long)]
    pub ub_table: Option<PathBuf>,
    #[arg(long)]
    pub tau_prerank: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct PredictArgs {
    /// Persisted model (model.json from `fit`)
    #[arg(long)]
    pub model: PathBuf,
    /// New predictor CSV; columns are matched to the model by name
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    /// Method tag; repeat for several (default: every method the response supports)
    #[arg(long = "method")]
    pub methods: Vec<String>,
    /// Inclusive subset-size range A..B (default: 2..min(N, p))
    #[arg(long)]
    pub m_range: Option<String>,
    /// Evaluation mode: in-sample or holdout
    #[arg(long, default_value = "in-sample")]
    pub eval: String,
    /// Holdout predictor CSV (holdout mode)
    #[arg(long)]
    pub holdout_x: Option<PathBuf>,
    /// Holdout response CSV (holdout mode)
    #[arg(long)]
    pub holdout_y: Option<PathBuf>,
    #[arg(long)]
    pub ub_table: Option<PathBuf>,
    #[arg(long)]
    pub tau_prerank: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Benchmark design: `uni` (N=172, p=13, q=1) or `multi` (N=52, p=172, q=7)
    #[arg(long)]
    pub spec_name: String,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Benchmark design: `uni` or `multi`
    #[arg(long)]
    pub spec_name: String,
    #[arg(long, default_value_t = 10)]
    pub replicates: usize,
    /// Method tag; repeat for several (default: every method the design supports)
    #[arg(long = "method")]
    pub methods: Vec<String>,
    /// Inclusive subset-size range A..B (default: the design's full range)
    #[arg(long)]
    pub m_range: Option<String>,
    #[arg(long)]
    pub ub_table: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rank(args) => commands::run_rank(&args),
        Command::SelectDim(args) => commands::run_select_dim(&args),
        Command::Fit(args) => commands::run_fit(&args),
        Command::Predict(args) => commands::run_predict(&args),
        Command::Sweep(args) => commands::run_sweep(&args),
        Command::Simulate(args) => commands::run_simulate(&args),
        Command::Bench(args) => commands::run_bench(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
