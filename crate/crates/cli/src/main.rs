//! `pegasos` — cost-sensitive PEGASOS SVM training and evaluation for
//! imbalanced binary classification from labeled CSV data.
//!
//! Exit codes: 0 success, 2 usage or input errors (bad flags, missing
//! files or columns, unparsable cells, shape mismatches), 3 runtime or
//! numeric degeneracies (single-class data, classes too small for the
//! requested folds, probes with no AUC improvements).

mod commands;
mod model_file;

use std::fmt;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Library errors map onto the two nonzero exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Malformed invocation or input: exit 2.
    Usage(String),
    /// Statistically or numerically unusable data: exit 3.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<pegasos_core::Error> for CliError {
    fn from(err: pegasos_core::Error) -> Self {
        if err.is_input_error() {
            CliError::Usage(err.to_string())
        } else {
            CliError::Runtime(err.to_string())
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pegasos",
    version,
    about = "Cost-sensitive PEGASOS SVM for imbalanced binary classification"
)]
struct Cli {
    /// Worker threads for grid and fold parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write it to a JSON file.
    Train(TrainArgs),
    /// Grid-search (lambda, bias) with stratified cross-validation.
    Cv(CvArgs),
    /// Emit learning or validation curves as CSV.
    Curves(CurvesArgs),
    /// Score a saved model or run a holdout evaluation.
    Evaluate(EvaluateArgs),
    /// Report stop-parameter statistics for one (lambda, bias).
    EstimateStop(EstimateStopArgs),
}

/// CSV input selection shared by the commands.
#[derive(Args, Clone)]
pub struct DataArgs {
    /// Labeled CSV file with a header row.
    #[arg(long)]
    data: std::path::PathBuf,
    /// Name of the target column.
    #[arg(long = "target-col")]
    target_col: String,
    /// Target value mapped to the positive class; all others are
    /// negative.
    #[arg(long = "positive-label")]
    positive_label: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Linear,
    Rbf,
    Poly,
}

/// Kernel selection; omitted entirely for the primal linear solver.
#[derive(Args, Clone)]
pub struct KernelArgs {
    /// Train the kernelized solver with this kernel family.
    #[arg(long, value_enum)]
    kernel: Option<KernelKind>,
    /// RBF bandwidth (required with --kernel rbf).
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Polynomial degree.
    #[arg(long, default_value_t = 3)]
    degree: u32,
    /// Polynomial additive constant.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    coef0: f64,
}

impl KernelArgs {
    pub fn spec(&self) -> Result<Option<pegasos_core::KernelSpec>, CliError> {
        use pegasos_core::KernelSpec;
        let spec = match self.kernel {
            None => return Ok(None),
            Some(KernelKind::Linear) => KernelSpec::Linear,
            Some(KernelKind::Rbf) => {
                let gamma = self.gamma.ok_or_else(|| {
                    CliError::Usage("--kernel rbf requires --gamma".into())
                })?;
                KernelSpec::Rbf { gamma }
            }
            Some(KernelKind::Poly) => KernelSpec::Polynomial {
                degree: self.degree,
                coef0: self.coef0,
            },
        };
        spec.validate()?;
        Ok(Some(spec))
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Regularization strength.
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    /// Fixed bias offset.
    #[arg(long, allow_negative_numbers = true)]
    bias: f64,
    /// Iteration budget T.
    #[arg(long, default_value_t = 1000)]
    iterations: u64,
    /// Stop parameter X: check the training AUC every X iterations.
    #[arg(long = "check-every")]
    check_every: u64,
    #[command(flatten)]
    kernel: KernelArgs,
    /// Project weights onto the 1/sqrt(lambda) ball each step
    /// (primal solver only).
    #[arg(long)]
    projection: bool,
    /// Seed (falls back to PEGASOS_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Output path for the model JSON.
    #[arg(long)]
    output: std::path::PathBuf,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of folds.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Comma-separated lambda values.
    #[arg(long = "lambda-grid", default_value = "0.0001,0.001,0.01,0.1,1,10,100,1000")]
    lambda_grid: String,
    /// Bias grid as linspace:LO:HI:N.
    #[arg(long = "bias-grid", default_value = "linspace:-2:2:10")]
    bias_grid: String,
    #[arg(long, default_value_t = 1000)]
    iterations: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Per-fold scores CSV.
    #[arg(long, default_value = "cv_scores.csv")]
    out: std::path::PathBuf,
    /// Mean-per-combination summary CSV.
    #[arg(long = "summary-out", default_value = "cv_summary.csv")]
    summary_out: std::path::PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveType {
    Learning,
    Validation,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VaryChoice {
    Lambda,
    Bias,
}

#[derive(Args)]
struct CurvesArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long = "type", value_enum)]
    curve_type: CurveType,
    /// Training proportions for learning curves.
    #[arg(long, default_value = "0.2,0.4,0.6,0.8,1.0")]
    proportions: String,
    /// Hyperparameter a validation curve varies.
    #[arg(long, value_enum)]
    vary: Option<VaryChoice>,
    /// Values of the varied hyperparameter (comma-separated).
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// Regularization (fixed value; ignored when --vary lambda).
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Bias offset (fixed value; ignored when --vary bias).
    #[arg(long, allow_negative_numbers = true)]
    bias: Option<f64>,
    /// Stop parameter X.
    #[arg(long = "check-every")]
    check_every: u64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 1000)]
    iterations: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "curves.csv")]
    out: std::path::PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Saved model JSON to score against --data.
    #[arg(long)]
    model: Option<std::path::PathBuf>,
    /// Labeled CSV file with a header row.
    #[arg(long)]
    data: std::path::PathBuf,
    /// Target column (defaults to the model's provenance).
    #[arg(long = "target-col")]
    target_col: Option<String>,
    /// Positive label (defaults to the model's provenance).
    #[arg(long = "positive-label")]
    positive_label: Option<String>,
    /// Test fraction for a train/evaluate split of --data.
    #[arg(long)]
    holdout: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    bias: Option<f64>,
    #[arg(long = "check-every")]
    check_every: Option<u64>,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value_t = 1000)]
    iterations: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the test ROC curve as fpr,tpr CSV.
    #[arg(long = "roc-out")]
    roc_out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CiModeChoice {
    Verbatim,
    Standard,
}

#[derive(Args)]
struct EstimateStopArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    bias: f64,
    #[arg(long, default_value_t = 1000)]
    iterations: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Confidence-interval centering.
    #[arg(long, value_enum, default_value_t = CiModeChoice::Verbatim)]
    mode: CiModeChoice,
}

/// Seed resolution: flag, then PEGASOS_SEED, then 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("PEGASOS_SEED") {
        Ok(value) => value.parse().map_err(|_| {
            CliError::Usage(format!("PEGASOS_SEED must be an unsigned integer, got '{value}'"))
        }),
        Err(_) => Ok(0),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Train(args) => commands::train(args),
        Command::Cv(args) => commands::cv(args),
        Command::Curves(args) => commands::curves(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::EstimateStop(args) => commands::estimate_stop(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore failures from double initialization in tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
