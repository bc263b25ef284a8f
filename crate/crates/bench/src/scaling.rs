//! Log-log scaling models over benchmark records: ordinary least squares of
//! `log₁₀(response)` on `log₁₀` of the chosen size variables, returning the
//! multiplicative constant, per-variable exponents, and R².

use crate::{BenchError, BenchRecord, Result};

/// Which measurement to model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseVar {
    Time,
    Memory,
}

/// Size variables available as regressors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorVar {
    /// Sample size N.
    SampleSize,
    /// Distinct outcome count M.
    DistinctCount,
    /// Predictor count p.
    PredictorCount,
    /// Combined parameter dimension M − 1 + p.
    CombinedDimension,
}

impl PredictorVar {
    pub fn name(self) -> &'static str {
        match self {
            PredictorVar::SampleSize => "N",
            PredictorVar::DistinctCount => "M",
            PredictorVar::PredictorCount => "p",
            PredictorVar::CombinedDimension => "M-1+p",
        }
    }

    fn value(self, r: &BenchRecord) -> f64 {
        match self {
            PredictorVar::SampleSize => r.n as f64,
            PredictorVar::DistinctCount => r.m_achieved as f64,
            PredictorVar::PredictorCount => r.p as f64,
            PredictorVar::CombinedDimension => (r.m_achieved - 1 + r.p) as f64,
        }
    }
}

/// A fitted multiplicative scaling model
/// `response ≈ constant · Π var_i^exponent_i`.
#[derive(Debug, Clone)]
pub struct LogLogFit {
    pub constant: f64,
    pub exponents: Vec<(String, f64)>,
    pub r_squared: f64,
}

impl LogLogFit {
    pub fn exponent(&self, name: &str) -> Option<f64> {
        self.exponents
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| *e)
    }

    pub fn predict(&self, values: &[f64]) -> f64 {
        let mut out = self.constant;
        for ((_, e), v) in self.exponents.iter().zip(values) {
            out *= v.powf(*e);
        }
        out
    }
}

/// Solve a small dense linear system by Gaussian elimination with partial
/// pivoting. Rank deficiency surfaces as an error.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(BenchError::RankDeficient);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let amt = factor * a[col][k];
                a[row][k] -= amt;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Fit the log-log linear model of the chosen response on the chosen size
/// variables. Requires at least 5 records with strictly positive responses.
pub fn fit_loglog_model(
    records: &[BenchRecord],
    response: ResponseVar,
    predictors: &[PredictorVar],
) -> Result<LogLogFit> {
    if records.len() < 5 {
        return Err(BenchError::TooFewRecords {
            needed: 5,
            got: records.len(),
        });
    }
    if predictors.is_empty() {
        return Err(BenchError::RankDeficient);
    }
    let n = records.len();
    let k = predictors.len();

    let mut design = Vec::with_capacity(n);
    let mut resp = Vec::with_capacity(n);
    for r in records {
        let value = match response {
            ResponseVar::Time => r.time_s,
            ResponseVar::Memory => r.peak_mem_bytes as f64,
        };
        if !(value > 0.0) {
            return Err(BenchError::NonPositiveResponse {
                n: r.n,
                m: r.m_achieved,
                p: r.p,
            });
        }
        let mut row = Vec::with_capacity(k + 1);
        row.push(1.0);
        for var in predictors {
            row.push(var.value(r).log10());
        }
        design.push(row);
        resp.push(value.log10());
    }

    // Normal equations XᵀX β = Xᵀy.
    let dim = k + 1;
    let mut xtx = vec![vec![0.0; dim]; dim];
    let mut xty = vec![0.0; dim];
    for (row, &y) in design.iter().zip(&resp) {
        for i in 0..dim {
            xty[i] += row[i] * y;
            for j in 0..dim {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve_dense(xtx, xty)?;

    let mean = resp.iter().sum::<f64>() / n as f64;
    let mut ss_tot = 0.0;
    let mut ss_res = 0.0;
    for (row, &y) in design.iter().zip(&resp) {
        let fitted: f64 = row.iter().zip(&coef).map(|(x, c)| x * c).sum();
        ss_res += (y - fitted) * (y - fitted);
        ss_tot += (y - mean) * (y - mean);
    }
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };

    Ok(LogLogFit {
        constant: 10f64.powf(coef[0]),
        exponents: predictors
            .iter()
            .zip(coef.iter().skip(1))
            .map(|(v, &e)| (v.name().to_string(), e))
            .collect(),
        r_squared,
    })
}
