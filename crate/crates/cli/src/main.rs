//! `cpm`: fit semiparametric cumulative probability models to continuous
//! outcomes, at scale.
//!
//! Subcommands: `fit` (whole-data, divide-and-combine, binning, rounding),
//! `simulate` (scenario datasets with known truth), `discretize` (outcome
//! reduction without fitting), `predict` (conditional summaries from saved
//! fits), and `bench` (time/memory scaling sweeps).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod artifacts;
mod commands;
mod config;
mod ingest;

#[derive(Parser)]
#[command(name = "cpm", version, about = "Cumulative probability models for big data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to a CSV dataset and write estimate artifacts.
    Fit(FitArgs),
    /// Generate a scenario dataset with a truth sidecar.
    Simulate(SimulateArgs),
    /// Reduce the number of distinct outcome values in a CSV file.
    Discretize(DiscretizeArgs),
    /// Conditional means/medians from a saved fit.
    Predict(PredictArgs),
    /// Run a time/memory scaling sweep over (N, M, p) cells.
    Bench(BenchArgs),
    /// Internal: run one benchmark cell in this process and print JSON.
    #[command(hide = true)]
    BenchCell(CellArgs),
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Input CSV file with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Outcome column name.
    #[arg(long)]
    pub outcome: Option<String>,
    /// Comma-separated predictor column names, or `all`.
    #[arg(long)]
    pub predictors: Option<String>,
    /// Link family: logit, probit, loglog, cloglog.
    #[arg(long)]
    pub link: Option<String>,
    /// whole, divide-combine, bin, round-decimal, round-sigdigit.
    #[arg(long)]
    pub approach: Option<String>,
    /// Subset count K (divide-combine).
    #[arg(long)]
    pub subsets: Option<usize>,
    /// Target distinct-outcome count (bin / rounding approaches).
    #[arg(long)]
    pub target: Option<usize>,
    /// Master seed for all randomized steps.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for subset fits (default: CPM_WORKERS or 1).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Convergence tolerance on the max absolute score.
    #[arg(long)]
    pub score_tol: Option<f64>,
    /// Convergence tolerance on the relative log-likelihood change.
    #[arg(long)]
    pub ll_tol: Option<f64>,
    /// Maximum Newton iterations.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Output directory for artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of covariate rows to predict at.
    #[arg(long)]
    pub predict_at: Option<PathBuf>,
    /// Also write full per-row conditional distributions.
    #[arg(long, default_value_t = false)]
    pub emit_distributions: bool,
    /// Comma-separated region edges for the discretization report.
    #[arg(long)]
    pub report_edges: Option<String>,
    /// Re-run divide-and-combine with this many consecutive seeds and
    /// record the per-seed beta estimates.
    #[arg(long)]
    pub seed_sweep: Option<usize>,
    /// key=value defaults; command-line flags override.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    /// identity, exp, or log-shift.
    #[arg(long, default_value = "identity")]
    pub transform: String,
    /// logistic or gumbel.
    #[arg(long, default_value = "logistic")]
    pub residual: String,
    /// Comma-separated true coefficients (defaults documented in the lib).
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path; the truth sidecar lands next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DiscretizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub outcome: String,
    /// bin, round-decimal, or round-sigdigit.
    #[arg(long)]
    pub approach: String,
    /// Target distinct-outcome count.
    #[arg(long)]
    pub target: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV with the outcome column replaced.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated region edges for the report.
    #[arg(long)]
    pub report_edges: Option<String>,
    /// Also write the report table to this path.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Fit output directory (meta.json, alpha.tsv, beta.tsv).
    #[arg(long)]
    pub model: PathBuf,
    /// CSV of covariate rows.
    #[arg(long)]
    pub at: PathBuf,
    /// Output TSV of per-row mean and median.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write per-row grid/cdf/pmf rows to this path.
    #[arg(long)]
    pub distribution_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated sample sizes.
    #[arg(long)]
    pub ns: String,
    /// Comma-separated distinct-outcome counts.
    #[arg(long)]
    pub ms: String,
    /// Comma-separated predictor counts.
    #[arg(long)]
    pub ps: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory (records.csv, models.json, loglog.tsv).
    #[arg(long)]
    pub out: PathBuf,
    /// Minimum M for records entering the memory scaling model.
    #[arg(long, default_value_t = 5000)]
    pub memory_min_m: usize,
}

#[derive(Args, Debug)]
pub struct CellArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => commands::cmd_fit(args),
        Command::Simulate(args) => commands::cmd_simulate(args),
        Command::Discretize(args) => commands::cmd_discretize(args),
        Command::Predict(args) => commands::cmd_predict(args),
        Command::Bench(args) => commands::cmd_bench(args),
        Command::BenchCell(args) => commands::cmd_bench_cell(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
