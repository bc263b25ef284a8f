//! Benchmark harness for CPM fits: run a grid of `(N, M, p)` cells, each in
//! an isolated child process so peak-memory high-water marks do not bleed
//! across fits, and model how time and memory scale with the problem size.
//!
//! Cells run strictly sequentially; concurrency would contaminate timings.

use std::path::PathBuf;
use std::process::Command;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod cell;
pub mod scaling;

pub use cell::{peak_memory_bytes, run_cell, CellOutcome, CellSpec};
pub use scaling::{fit_loglog_model, LogLogFit, PredictorVar, ResponseVar};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("need at least {needed} benchmark records, got {got}")]
    TooFewRecords { needed: usize, got: usize },

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("non-positive response at cell N={n}, M={m}, p={p}")]
    NonPositiveResponse { n: usize, m: usize, p: usize },

    #[error("failed to launch cell runner: {0}")]
    Runner(#[from] std::io::Error),

    #[error("cell runner produced unparseable output: {0}")]
    Protocol(String),
}

pub type Result<T> = std::result::Result<T, BenchError>;

/// One measured benchmark cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n: usize,
    pub m_requested: usize,
    pub m_achieved: usize,
    pub p: usize,
    pub time_s: f64,
    pub peak_mem_bytes: u64,
    pub converged: bool,
}

impl From<CellOutcome> for BenchRecord {
    fn from(o: CellOutcome) -> Self {
        BenchRecord {
            n: o.n,
            m_requested: o.m_requested,
            m_achieved: o.m_achieved,
            p: o.p,
            time_s: o.time_s,
            peak_mem_bytes: o.peak_mem_bytes,
            converged: o.converged,
        }
    }
}

/// Requested benchmark grid.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub ns: Vec<usize>,
    pub ms: Vec<usize>,
    pub ps: Vec<usize>,
    pub seed: u64,
}

/// All feasible cells of the grid (`M ≤ N`), in deterministic order.
pub fn enumerate_cells(grid: &GridSpec) -> Vec<CellSpec> {
    let mut cells = Vec::new();
    for &p in &grid.ps {
        for &n in &grid.ns {
            for &m in &grid.ms {
                if m <= n {
                    cells.push(CellSpec {
                        n,
                        m,
                        p,
                        seed: grid.seed,
                    });
                }
            }
        }
    }
    cells
}

/// How to launch one isolated cell run.
#[derive(Debug, Clone)]
pub struct RunnerCmd {
    pub program: PathBuf,
    /// Arguments placed before the cell coordinates (e.g. a subcommand).
    pub prefix_args: Vec<String>,
}

impl RunnerCmd {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        RunnerCmd {
            program: program.into(),
            prefix_args: Vec::new(),
        }
    }

    pub fn with_prefix(program: impl Into<PathBuf>, prefix: &[&str]) -> Self {
        RunnerCmd {
            program: program.into(),
            prefix_args: prefix.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Run every feasible cell of the grid, one isolated child process at a
/// time, and collect the records. A cell whose child fails is recorded as
/// unconverged rather than aborting the sweep.
pub fn run_grid(grid: &GridSpec, runner: &RunnerCmd) -> Result<Vec<BenchRecord>> {
    let cells = enumerate_cells(grid);
    let mut records = Vec::with_capacity(cells.len());
    for cell in cells {
        match run_cell_isolated(&cell, runner) {
            Ok(outcome) => records.push(outcome.into()),
            Err(BenchError::Runner(e)) => return Err(BenchError::Runner(e)),
            Err(_) => records.push(BenchRecord {
                n: cell.n,
                m_requested: cell.m,
                m_achieved: 0,
                p: cell.p,
                time_s: 0.0,
                peak_mem_bytes: 0,
                converged: false,
            }),
        }
    }
    Ok(records)
}

/// Launch one cell in a child process and parse its JSON-line report.
pub fn run_cell_isolated(cell: &CellSpec, runner: &RunnerCmd) -> Result<CellOutcome> {
    let output = Command::new(&runner.program)
        .args(&runner.prefix_args)
        .args([
            "--n",
            &cell.n.to_string(),
            "--m",
            &cell.m.to_string(),
            "--p",
            &cell.p.to_string(),
            "--seed",
            &cell.seed.to_string(),
        ])
        .output()?;
    if !output.status.success() {
        return Err(BenchError::Protocol(format!(
            "runner exited with {} for cell N={}, M={}, p={}",
            output.status, cell.n, cell.m, cell.p
        )));
    }
    let stdout = String::from_utf8_lossy(&output.stdout);
    let line = stdout
        .lines()
        .rev()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| BenchError::Protocol("runner produced no output".into()))?;
    serde_json::from_str(line).map_err(|e| BenchError::Protocol(e.to_string()))
}
