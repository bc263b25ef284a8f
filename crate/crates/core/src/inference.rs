//! Conditional-distribution functionals derived from a fitted model.
//!
//! For a covariate vector `x₀`, the fitted conditional CDF over the outcome
//! grid is `P_j = F_ε(α̂_j − β̂ᵀx₀)` for `j < M` and `P_M = 1`; the PMF is
//! its first difference. Means and medians are plain functionals of that
//! distribution. No standard errors are produced for them: that would need
//! alpha covariances, which fits deliberately do not materialize.

use crate::divide::CombinedFit;
use crate::error::{CpmError, Result};
use crate::fit::CpmFit;
use crate::link::LinkFamily;

/// Anything that exposes the pieces needed for conditional inference.
pub trait FittedModel {
    fn alpha(&self) -> &[f64];
    fn beta(&self) -> &[f64];
    fn outcome_grid(&self) -> &[f64];
    fn link(&self) -> LinkFamily;
}

impl FittedModel for CpmFit {
    fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    fn beta(&self) -> &[f64] {
        self.beta.as_slice().expect("contiguous beta")
    }

    fn outcome_grid(&self) -> &[f64] {
        &self.distinct
    }

    fn link(&self) -> LinkFamily {
        self.link
    }
}

impl FittedModel for CombinedFit {
    fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    fn beta(&self) -> &[f64] {
        self.beta.as_slice().expect("contiguous beta")
    }

    fn outcome_grid(&self) -> &[f64] {
        &self.distinct
    }

    fn link(&self) -> LinkFamily {
        self.link
    }
}

/// Conditional outcome distribution at one covariate vector.
#[derive(Debug, Clone)]
pub struct ConditionalDistribution {
    /// Distinct outcome values `y_(1) … y_(M)`.
    pub grid: Vec<f64>,
    /// `P_j = Pr(Y ≤ y_(j) | x₀)`, ending in exactly 1.
    pub cdf: Vec<f64>,
    /// `p_j = P_j − P_{j−1}`.
    pub pmf: Vec<f64>,
}

impl ConditionalDistribution {
    /// Build from a grid and CDF, deriving the PMF.
    pub fn from_cdf(grid: Vec<f64>, cdf: Vec<f64>) -> Result<Self> {
        if grid.len() != cdf.len() || grid.is_empty() {
            return Err(CpmError::DimensionMismatch {
                context: "grid vs cdf length",
                expected: grid.len(),
                got: cdf.len(),
            });
        }
        if cdf.windows(2).any(|w| w[0] > w[1]) || *cdf.last().unwrap() != 1.0 {
            return Err(CpmError::InvalidArgument(
                "cdf must be non-decreasing and end at 1".into(),
            ));
        }
        let mut pmf = Vec::with_capacity(cdf.len());
        let mut prev = 0.0;
        for &p in &cdf {
            pmf.push((p - prev).max(0.0));
            prev = p;
        }
        Ok(ConditionalDistribution { grid, cdf, pmf })
    }
}

/// Conditional distribution of the outcome given `x₀` under a fitted model.
pub fn conditional_distribution(
    fit: &dyn FittedModel,
    x0: &[f64],
) -> Result<ConditionalDistribution> {
    let beta = fit.beta();
    if x0.len() != beta.len() {
        return Err(CpmError::DimensionMismatch {
            context: "covariate vector vs fitted beta",
            expected: beta.len(),
            got: x0.len(),
        });
    }
    let eta: f64 = beta.iter().zip(x0).map(|(b, x)| b * x).sum();
    let link = fit.link();
    let grid = fit.outcome_grid().to_vec();
    let mut cdf: Vec<f64> = fit.alpha().iter().map(|&a| link.cdf(a - eta)).collect();
    cdf.push(1.0);
    // Repaired combined fits may carry ties in alpha; clamp the tiny
    // negative differences rounding can produce.
    for j in 1..cdf.len() {
        if cdf[j] < cdf[j - 1] {
            cdf[j] = cdf[j - 1];
        }
    }
    ConditionalDistribution::from_cdf(grid, cdf)
}

/// Mean of the conditional distribution, `Σ_j p_j y_(j)`.
pub fn conditional_mean(dist: &ConditionalDistribution) -> f64 {
    dist.pmf.iter().zip(&dist.grid).map(|(p, y)| p * y).sum()
}

/// Median of the conditional distribution.
///
/// When `P_j < 0.5 < P_{j+1}` the median is the average of `y_(j)` and
/// `y_(j+1)`; an exact `P_j = 0.5` returns `y_(j)`; if already `P_1 > 0.5`
/// the median is `y_(1)`, and if only `P_M ≥ 0.5` it is `y_(M)`.
pub fn conditional_median(dist: &ConditionalDistribution) -> f64 {
    let m = dist.grid.len();
    for j in 0..m {
        let p = dist.cdf[j];
        if p == 0.5 {
            return dist.grid[j];
        }
        if p > 0.5 {
            return if j == 0 {
                dist.grid[0]
            } else {
                0.5 * (dist.grid[j - 1] + dist.grid[j])
            };
        }
    }
    dist.grid[m - 1]
}
