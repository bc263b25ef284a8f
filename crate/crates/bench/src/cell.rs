//! One benchmark cell: generate a dataset with the requested `(N, M, p)`,
//! fit a CPM, and report wall-clock time and the process peak-memory
//! high-water mark.
//!
//! A cell is meant to run in a fresh child process: the RSS high-water mark
//! is cumulative per process, so fits sharing a process would contaminate
//! each other's readings. `run_cell` itself is process-agnostic; the
//! `cpm-bench-cell` binary wraps it for isolation.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use cpm_core::discretize::bin_equal_quantile;
use cpm_core::rng::{residual_draw, standard_normal, stream_rng, Stream};
use cpm_core::{fit_cpm, Dataset, FitOptions, LinkFamily};
use ndarray::{Array1, Array2};

/// Coordinates of one benchmark cell.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CellSpec {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub seed: u64,
}

/// Measured outcome of one cell, serialized as a JSON line by the runner.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellOutcome {
    pub n: usize,
    pub m_requested: usize,
    pub m_achieved: usize,
    pub p: usize,
    pub time_s: f64,
    pub peak_mem_bytes: u64,
    pub converged: bool,
}

/// Continuous-predictor dataset with `m` distinct outcomes obtained by
/// equal-quantile binning of a latent logistic outcome.
pub fn generate_cell_dataset(spec: &CellSpec) -> Dataset {
    let cell_seed = spec.seed
        ^ (spec.n as u64).rotate_left(17)
        ^ (spec.m as u64).rotate_left(34)
        ^ (spec.p as u64).rotate_left(51);
    let mut rng = stream_rng(cell_seed, Stream::Bench);
    let beta: Vec<f64> = (0..spec.p)
        .map(|j| {
            if spec.p == 1 {
                0.5
            } else {
                -1.0 + 2.0 * j as f64 / (spec.p - 1) as f64
            }
        })
        .collect();
    let mut x = Array2::<f64>::zeros((spec.n, spec.p));
    let mut y = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let mut eta = 0.0;
        for j in 0..spec.p {
            let v = standard_normal(&mut rng);
            x[[i, j]] = v;
            eta += beta[j] * v;
        }
        y.push(eta + residual_draw(LinkFamily::Logit, &mut rng));
    }
    let y = if spec.m < spec.n {
        let mut bin_rng = stream_rng(cell_seed, Stream::Binning);
        bin_equal_quantile(&y, spec.m, &mut bin_rng)
            .expect("2 <= m < n by construction")
            .y_b
    } else {
        y
    };
    Dataset::new(Array1::from_vec(y), x).expect("generated data is finite")
}

/// Run one cell in the current process: one discarded warm-up fit, one
/// timed fit, then the process peak-RSS reading.
pub fn run_cell(spec: &CellSpec) -> CellOutcome {
    let data = generate_cell_dataset(spec);
    let opts = FitOptions::default();

    // Warm-up fit: touches the allocator and caches, result discarded.
    let _ = fit_cpm(&data, LinkFamily::Logit, &opts);

    let start = Instant::now();
    let fit = fit_cpm(&data, LinkFamily::Logit, &opts);
    let time_s = start.elapsed().as_secs_f64();

    let (m_achieved, converged) = match &fit {
        Ok(f) => (f.m(), f.converged),
        Err(_) => (0, false),
    };
    CellOutcome {
        n: spec.n,
        m_requested: spec.m,
        m_achieved,
        p: spec.p,
        time_s,
        peak_mem_bytes: peak_memory_bytes().unwrap_or(0),
        converged,
    }
}

/// Process peak resident-set size in bytes, from `/proc/self/status`
/// (`VmHWM`), falling back to `getrusage`.
pub fn peak_memory_bytes() -> Option<u64> {
    if let Ok(status) = std::fs::read_to_string("/proc/self/status") {
        for line in status.lines() {
            if let Some(rest) = line.strip_prefix("VmHWM:") {
                let kb: u64 = rest
                    .trim()
                    .trim_end_matches("kB")
                    .trim()
                    .parse()
                    .ok()?;
                return Some(kb * 1024);
            }
        }
    }
    // ru_maxrss is reported in kilobytes on Linux.
    let mut usage = std::mem::MaybeUninit::<libc::rusage>::uninit();
    let rc = unsafe { libc::getrusage(libc::RUSAGE_SELF, usage.as_mut_ptr()) };
    if rc == 0 {
        let usage = unsafe { usage.assume_init() };
        Some(usage.ru_maxrss as u64 * 1024)
    } else {
        None
    }
}
