//! Divide-and-combine fitting: partition the data into `K` near-equal
//! subsets with the extreme outcomes spread one per subset, fit a CPM to
//! each subset independently (in parallel), then align the per-subset alpha
//! estimates on the global outcome grid via K-vectors and average.
//!
//! A K-vector holds, for one combined parameter, the 1-based index of the
//! contributing parameter in each subset's own estimate vector, with `0`
//! meaning "this subset does not contribute". An alpha cut at global value
//! `y` maps to the subset interval containing `y`: the entry is
//! `#{v in subset : v ≤ y}` when that count names an existing subset alpha,
//! else `0`. Evaluating each subset's alpha step function at the cut keeps
//! every row over `[y_(K), y_(N−K)]` fully populated.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::{index_outcomes, Dataset, OutcomeIndex};
use crate::error::{CpmError, Result};
use crate::fit::{fit_cpm, CpmFit, FitOptions};
use crate::link::LinkFamily;

/// Assignment of observations to `K` subsets.
#[derive(Debug, Clone)]
pub struct PartitionPlan {
    pub k: usize,
    /// Per-observation subset label in `0..k`.
    pub assignment: Vec<u32>,
    pub subset_sizes: Vec<usize>,
}

impl PartitionPlan {
    /// Observation indices of one subset, in original order.
    pub fn subset_rows(&self, subset: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &s)| s as usize == subset)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Partition with near-equal sizes (`max |n_k − n_k'| ≤ 1`); the `K`
/// smallest outcomes land in `K` distinct subsets, likewise the `K` largest,
/// and everything else is allocated randomly.
pub fn partition(data: &Dataset, k: usize, rng: &mut impl Rng) -> Result<PartitionPlan> {
    let n = data.n();
    if k < 2 || k > n / 2 {
        return Err(CpmError::InvalidArgument(format!(
            "subset count must satisfy 2 <= K <= N/2, got K={k} with N={n}"
        )));
    }

    let q = n / k;
    let r = n % k;
    let mut sizes = vec![q; k];
    let mut extras: Vec<usize> = (0..k).collect();
    extras.shuffle(rng);
    for &s in extras.iter().take(r) {
        sizes[s] += 1;
    }

    // Stable outcome order; ties broken by original index.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| data.y[a].partial_cmp(&data.y[b]).unwrap().then(a.cmp(&b)));

    let mut assignment = vec![u32::MAX; n];
    let mut low_perm: Vec<usize> = (0..k).collect();
    low_perm.shuffle(rng);
    for (pos, &subset) in low_perm.iter().enumerate() {
        assignment[order[pos]] = subset as u32;
    }
    let mut high_perm: Vec<usize> = (0..k).collect();
    high_perm.shuffle(rng);
    for (pos, &subset) in high_perm.iter().enumerate() {
        assignment[order[n - k + pos]] = subset as u32;
    }

    // Remaining capacity per subset after the two extreme rounds.
    let mut labels: Vec<u32> = Vec::with_capacity(n - 2 * k);
    for (s, &size) in sizes.iter().enumerate() {
        for _ in 0..size - 2 {
            labels.push(s as u32);
        }
    }
    labels.shuffle(rng);
    for (pos, &i) in order.iter().take(n - k).skip(k).enumerate() {
        assignment[i] = labels[pos];
    }

    Ok(PartitionPlan {
        k,
        assignment,
        subset_sizes: sizes,
    })
}

/// Per-parameter alignment table for the combine step.
#[derive(Debug, Clone)]
pub struct KVectorTable {
    pub k: usize,
    /// Global distinct-outcome count.
    pub m: usize,
    pub p: usize,
    /// One row per combined parameter, ordered `(α_1..α_{M−1}, β_1..β_p)`.
    /// Entries are 1-based positions in the subset's parameter vector; 0
    /// means no contribution.
    pub rows: Vec<Vec<u32>>,
}

impl KVectorTable {
    pub fn alpha_row(&self, j: usize) -> &[u32] {
        &self.rows[j]
    }

    pub fn beta_row(&self, i: usize) -> &[u32] {
        &self.rows[self.m - 1 + i]
    }
}

/// Build the K-vector table from the global grid and per-subset grids.
pub fn build_kvectors(
    global: &OutcomeIndex,
    subsets: &[OutcomeIndex],
    p: usize,
) -> Result<KVectorTable> {
    let m = global.m();
    let k = subsets.len();
    for sub in subsets {
        for &v in sub.distinct() {
            if global
                .distinct()
                .binary_search_by(|probe| probe.partial_cmp(&v).unwrap())
                .is_err()
            {
                return Err(CpmError::InconsistentGrid { value: v });
            }
        }
    }

    let mut rows = Vec::with_capacity(m - 1 + p);
    for j in 0..m - 1 {
        let cut = global.distinct()[j];
        let row = subsets
            .iter()
            .map(|sub| {
                let d = sub.distinct();
                let count = d.partition_point(|&v| v <= cut);
                if count >= 1 && count <= d.len() - 1 {
                    count as u32
                } else {
                    0
                }
            })
            .collect();
        rows.push(row);
    }
    for i in 0..p {
        let row = subsets
            .iter()
            .map(|sub| (sub.m() - 1 + i + 1) as u32)
            .collect();
        rows.push(row);
    }
    Ok(KVectorTable { k, m, p, rows })
}

/// Convergence metadata for one subset fit.
#[derive(Debug, Clone)]
pub struct SubsetSummary {
    pub subset: usize,
    pub size: usize,
    pub m: usize,
    pub iterations: usize,
    pub converged: bool,
    pub loglik: f64,
}

/// Averaged divide-and-combine estimates on the global outcome grid.
///
/// Only alpha variances and the `p×p` beta covariance are materialized; the
/// full combined covariance is deliberately never formed, so conditional
/// means and medians derived from this fit carry no standard errors.
#[derive(Debug, Clone)]
pub struct CombinedFit {
    pub alpha: Vec<f64>,
    pub beta: Array1<f64>,
    pub alpha_var: Vec<f64>,
    pub beta_cov: Array2<f64>,
    pub kvectors: KVectorTable,
    pub subset_fits: Vec<SubsetSummary>,
    pub distinct: Vec<f64>,
    pub link: LinkFamily,
    pub warnings: Vec<String>,
}

impl CombinedFit {
    pub fn m(&self) -> usize {
        self.distinct.len()
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn alpha_se(&self) -> Vec<f64> {
        self.alpha_var.iter().map(|v| v.sqrt()).collect()
    }

    pub fn beta_se(&self) -> Vec<f64> {
        (0..self.p()).map(|j| self.beta_cov[[j, j]].sqrt()).collect()
    }
}

/// End-of-range monotonicity repair: backwardly for the first `K−1` cuts set
/// `α_i = min(α_i, α_{i+1})`, forwardly for the last `K−1` cuts set
/// `α_i = max(α_i, α_{i−1})`. The interior is never touched.
pub fn enforce_monotonicity(alpha: &[f64], k: usize, m: usize) -> Vec<f64> {
    let len = m - 1;
    assert_eq!(alpha.len(), len, "alpha length must be M−1");
    let mut out = alpha.to_vec();
    if len < 2 {
        return out;
    }
    let head_end = (k - 1).min(len - 1);
    for j in (0..head_end).rev() {
        out[j] = out[j].min(out[j + 1]);
    }
    let tail_start = m.saturating_sub(k).max(1);
    for j in tail_start..len {
        out[j] = out[j].max(out[j - 1]);
    }
    out
}

fn subset_param(fit: &CpmFit, idx_1based: u32) -> f64 {
    let a = idx_1based as usize - 1;
    let ma = fit.alpha.len();
    if a < ma {
        fit.alpha[a]
    } else {
        fit.beta[a - ma]
    }
}

fn subset_param_var(fit: &CpmFit, idx_1based: u32) -> f64 {
    let a = idx_1based as usize - 1;
    let ma = fit.alpha.len();
    if a < ma {
        fit.alpha_var[a]
    } else {
        let j = a - ma;
        fit.beta_cov[[j, j]]
    }
}

/// Average the subset estimates along the K-vector table, repair end
/// monotonicity, and aggregate the variance blocks.
pub fn combine(
    fits: &[CpmFit],
    table: &KVectorTable,
    global_distinct: &[f64],
) -> Result<CombinedFit> {
    let k = table.k;
    if fits.len() != k {
        return Err(CpmError::DimensionMismatch {
            context: "subset fit count vs K-vector table",
            expected: k,
            got: fits.len(),
        });
    }
    let link = fits[0].link;
    for (s, fit) in fits.iter().enumerate() {
        if !fit.converged {
            return Err(CpmError::SubsetNotConverged { subset: s });
        }
        if fit.link != link {
            return Err(CpmError::InvalidArgument(format!(
                "subset {s} was fit with link {}, expected {link}",
                fit.link
            )));
        }
    }
    let m = table.m;
    let p = table.p;

    let mut alpha = Vec::with_capacity(m - 1);
    let mut alpha_var = Vec::with_capacity(m - 1);
    for j in 0..m - 1 {
        let row = table.alpha_row(j);
        let mut est = 0.0;
        let mut var = 0.0;
        let mut count = 0usize;
        for (s, &a) in row.iter().enumerate() {
            if a > 0 {
                est += subset_param(&fits[s], a);
                var += subset_param_var(&fits[s], a);
                count += 1;
            }
        }
        if count == 0 {
            return Err(CpmError::InvalidArgument(format!(
                "alpha parameter {j} has no contributing subset"
            )));
        }
        alpha.push(est / count as f64);
        alpha_var.push(var / (count * count) as f64);
    }
    let alpha = enforce_monotonicity(&alpha, k, m);

    let mut beta = Array1::<f64>::zeros(p);
    let mut beta_cov = Array2::<f64>::zeros((p, p));
    for fit in fits {
        for i in 0..p {
            beta[i] += fit.beta[i];
            for j in 0..p {
                beta_cov[[i, j]] += fit.beta_cov[[i, j]];
            }
        }
    }
    let kf = k as f64;
    beta.mapv_inplace(|v| v / kf);
    beta_cov.mapv_inplace(|v| v / (kf * kf));

    let subset_fits = fits
        .iter()
        .enumerate()
        .map(|(s, f)| SubsetSummary {
            subset: s,
            size: 0, // filled by the orchestrator, which knows the partition
            m: f.m(),
            iterations: f.iterations,
            converged: f.converged,
            loglik: f.loglik,
        })
        .collect();

    Ok(CombinedFit {
        alpha,
        beta,
        alpha_var,
        beta_cov,
        kvectors: table.clone(),
        subset_fits,
        distinct: global_distinct.to_vec(),
        link,
        warnings: Vec::new(),
    })
}

/// Full divide-and-combine pipeline: partition, fit subsets in parallel,
/// align, and average. Subset fits run on a dedicated pool of `workers`
/// threads; results are combined in subset order, so the output is
/// deterministic for a fixed seed.
pub fn fit_divide_combine(
    data: &Dataset,
    link: LinkFamily,
    k: usize,
    seed: u64,
    workers: usize,
    opts: &FitOptions,
) -> Result<CombinedFit> {
    let global = index_outcomes(data.y.as_slice().expect("contiguous outcome vector"))?;

    let mut warnings = Vec::new();
    for col in 0..data.p() {
        let column = data.x.column(col);
        let mut counts = std::collections::HashMap::new();
        for &v in column.iter() {
            *counts.entry(v.to_bits()).or_insert(0usize) += 1;
        }
        let max_count = counts.values().copied().max().unwrap_or(0);
        let minority = data.n() - max_count;
        if minority < k {
            warnings.push(format!(
                "predictor column {col} is near-constant (minority count {minority} < K={k}); \
                 some subsets may not be able to estimate its coefficient"
            ));
        }
    }

    let mut rng = crate::rng::stream_rng(seed, crate::rng::Stream::Partition);
    let plan = partition(data, k, &mut rng)?;

    let subsets: Vec<Dataset> = (0..k)
        .map(|s| data.select_rows(&plan.subset_rows(s)))
        .collect();
    for (s, sub) in subsets.iter().enumerate() {
        for col in 0..sub.p() {
            let column = sub.x.column(col);
            let first = column[0];
            if column.iter().all(|&v| v == first) {
                return Err(CpmError::InestimableCoefficient {
                    column: col,
                    subset: s,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CpmError::InvalidArgument(format!("worker pool: {e}")))?;
    let fits: Vec<Result<CpmFit>> = pool.install(|| {
        use rayon::prelude::*;
        subsets
            .par_iter()
            .map(|sub| fit_cpm(sub, link, opts))
            .collect()
    });
    let mut resolved = Vec::with_capacity(k);
    for fit in fits {
        resolved.push(fit?);
    }

    let subset_indices: Vec<OutcomeIndex> = subsets
        .iter()
        .map(|sub| index_outcomes(sub.y.as_slice().expect("contiguous subset outcome")))
        .collect::<Result<_>>()?;
    let table = build_kvectors(&global, &subset_indices, data.p())?;
    let mut combined = combine(&resolved, &table, global.distinct())?;
    for (summary, size) in combined.subset_fits.iter_mut().zip(&plan.subset_sizes) {
        summary.size = *size;
    }
    combined.warnings = warnings;
    Ok(combined)
}
