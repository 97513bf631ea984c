//! Command-line surface.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use heavytail_core::{Method, Nu};

#[derive(Debug, Parser)]
#[command(
    name = "heavytail",
    version,
    about = "Robust scale/scatter estimation and tail-parameter learning for heavy-tailed data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the shape matrix, scale, and scatter estimates on CSV data.
    Fit(FitArgs),
    /// Estimate the tail parameter (degrees of freedom) on CSV data.
    Nu(NuArgs),
    /// Generate synthetic heavy-tailed samples and write them as CSV.
    Simulate(SimulateArgs),
    /// Run a seeded Monte-Carlo benchmark over a grid of (n, nu) cells.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
pub struct FitArgs {
    /// Input CSV: rows are observations, columns are variables; a single
    /// non-numeric header line is detected and skipped.
    #[arg(long)]
    pub input: PathBuf,

    /// Output path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Output format (fit reports are JSON).
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,

    /// Convergence tolerance of the shape-matrix fixed point.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    /// Iteration cap for the shape-matrix fixed point.
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,

    /// Shrinkage coefficient in [0, 1]; when given, the report also
    /// carries beta * scatter + (1 - beta) * scale * I.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Parser)]
pub struct NuArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,

    /// Estimators to run (comma-separated subset of twe,opp,kurtosis).
    #[arg(long, value_delimiter = ',', value_parser = parse_method,
          default_value = "twe,opp,kurtosis")]
    pub methods: Vec<Method>,

    /// Shape-solver tolerance (the iterative tail estimator keeps its own
    /// stopping rule).
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
}

#[derive(Debug, Parser)]
pub struct SimulateArgs {
    /// Dimension of each observation.
    #[arg(long)]
    pub p: usize,

    /// Number of observations.
    #[arg(long)]
    pub n: usize,

    /// Degrees of freedom of the t family, or "inf" for Gaussian.
    #[arg(long, value_parser = parse_nu)]
    pub nu: Nu,

    /// AR(1) correlation of the scatter model.
    #[arg(long, default_value_t = 0.6)]
    pub rho: f64,

    /// Scale (mean eigenvalue) of the scatter model.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// CSV file with a p x p positive-definite matrix overriding the
    /// AR(1) scatter.
    #[arg(long)]
    pub scatter_file: Option<PathBuf>,

    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Parser)]
pub struct BenchArgs {
    #[arg(long)]
    pub p: usize,

    /// Sample sizes of the grid (comma-separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,

    /// Tail parameters of the grid (comma-separated reals or "inf").
    #[arg(long, value_delimiter = ',', value_parser = parse_nu, required = true)]
    pub nu: Vec<Nu>,

    #[arg(long, default_value_t = 0.6)]
    pub rho: f64,

    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,

    /// Monte-Carlo replications per cell.
    #[arg(long, default_value_t = 500)]
    pub reps: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_delimiter = ',', value_parser = parse_method,
          default_value = "twe,opp,kurtosis")]
    pub methods: Vec<Method>,

    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,

    /// Worker threads for replications; falls back to HEAVYTAIL_THREADS,
    /// then to the machine parallelism. Results are byte-identical at any
    /// thread count.
    #[arg(long)]
    pub threads: Option<usize>,

    /// CSV file with a p x p positive-definite matrix overriding the
    /// AR(1) scatter.
    #[arg(long)]
    pub scatter_file: Option<PathBuf>,

    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,

    /// Also dump one row per replication to this CSV for external
    /// plotting.
    #[arg(long)]
    pub raw_output: Option<PathBuf>,
}

pub fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

pub fn parse_nu(s: &str) -> Result<Nu, String> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinite") {
        return Ok(Nu::Infinite);
    }
    let v: f64 = t
        .parse()
        .map_err(|_| format!("'{t}' is not a number or 'inf'"))?;
    if v <= 0.0 || !v.is_finite() {
        return Err(format!("nu = {v} must be positive"));
    }
    Ok(Nu::Finite(v))
}
