//! Newton fitting of the cumulative probability model.
//!
//! The full `(M−1+p)`-dimensional parameter vector is updated jointly; each
//! step solves the structured Newton system in O(Mp²) time and O(Mp) memory.
//! Monotonicity of alpha is maintained implicitly: any trial step that makes
//! some category probability non-positive evaluates to `+∞` and is rejected
//! by step-halving.

use ndarray::{Array1, Array2};

use crate::data::{index_outcomes, Dataset, OutcomeIndex};
use crate::error::{CpmError, Result};
use crate::likelihood::{likelihood_pass, nll_unchecked, StructuredHessian};
use crate::link::LinkFamily;
use crate::solver::StructuredFactor;

/// Optimizer controls. Defaults follow the library's documented contract.
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Convergence when the max absolute score drops below this.
    pub score_tol: f64,
    /// Convergence when the relative log-likelihood change drops below this.
    pub ll_tol: f64,
    /// Maximum Newton iterations before giving up (`converged = false`).
    pub max_iter: usize,
    /// Any parameter exceeding this magnitude is treated as separation.
    pub param_bound: f64,
    /// Maximum step halvings per Newton iteration.
    pub max_step_halvings: u32,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            score_tol: 1e-8,
            ll_tol: 1e-10,
            max_iter: 100,
            param_bound: 500.0,
            max_step_halvings: 30,
        }
    }
}

/// Extra per-fit diagnostics beyond the headline convergence fields.
#[derive(Debug, Clone, Default)]
pub struct FitDiagnostics {
    /// Negative log-likelihood after each accepted iteration (index 0 is the
    /// starting value). Non-increasing by construction.
    pub nll_trace: Vec<f64>,
    /// Total step halvings across all iterations.
    pub halvings: u32,
    /// Max absolute score component at exit.
    pub max_score: f64,
    /// Some CDF evaluation under- or overflowed and was clamped.
    pub tail_clamped: bool,
    /// Step-halving could not find a decreasing step.
    pub line_search_failed: bool,
}

/// A fitted cumulative probability model.
#[derive(Debug, Clone)]
pub struct CpmFit {
    /// Alpha step-function values at the `M−1` interior cuts (latent scale).
    pub alpha: Vec<f64>,
    /// Regression coefficients.
    pub beta: Array1<f64>,
    /// Variances of the alpha estimates (diagonal of the inverse only).
    pub alpha_var: Vec<f64>,
    /// Full `p×p` covariance of the beta estimates.
    pub beta_cov: Array2<f64>,
    /// Maximized log-likelihood.
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Sorted distinct outcome values defining the cuts.
    pub distinct: Vec<f64>,
    pub link: LinkFamily,
    pub diagnostics: FitDiagnostics,
}

impl CpmFit {
    pub fn m(&self) -> usize {
        self.distinct.len()
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    /// Standard errors of the alpha estimates.
    pub fn alpha_se(&self) -> Vec<f64> {
        self.alpha_var.iter().map(|v| v.sqrt()).collect()
    }

    /// Standard errors of the beta estimates.
    pub fn beta_se(&self) -> Vec<f64> {
        (0..self.p()).map(|j| self.beta_cov[[j, j]].sqrt()).collect()
    }
}

/// Exact no-covariate MLE: alpha evaluated at the empirical CDF cut points,
/// `α_j = G(Σ_{k≤j} n_k / N)`. Also the Newton starting point.
pub fn empirical_cdf_alpha(index: &OutcomeIndex, link: LinkFamily) -> Result<Vec<f64>> {
    let counts = index.category_counts();
    let n = index.ranks().len() as f64;
    let mut alpha = Vec::with_capacity(index.m() - 1);
    let mut cum = 0usize;
    for &c in counts.iter().take(index.m() - 1) {
        cum += c;
        alpha.push(link.quantile(cum as f64 / n)?);
    }
    Ok(alpha)
}

fn max_abs(v: &Array1<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Variance estimates from a structured Hessian of the log-likelihood:
/// alpha variances via the tridiagonal inverse-diagonal recursion plus the
/// rank-p Schur correction, and the `p×p` beta covariance. The full
/// `(M−1+p)²` inverse is never stored.
pub fn variance(hessian: &StructuredHessian) -> Result<(Vec<f64>, Array2<f64>)> {
    let factor = StructuredFactor::factor(hessian)?;
    Ok((factor.alpha_variances(), factor.beta_covariance()))
}

/// Fit a CPM by Newton's method with step-halving.
pub fn fit_cpm(data: &Dataset, link: LinkFamily, opts: &FitOptions) -> Result<CpmFit> {
    let index = index_outcomes(data.y.as_slice().expect("contiguous outcome vector"))?;
    fit_indexed(data, &index, link, opts)
}

pub(crate) fn fit_indexed(
    data: &Dataset,
    index: &OutcomeIndex,
    link: LinkFamily,
    opts: &FitOptions,
) -> Result<CpmFit> {
    let p = data.p();
    let ma = index.m() - 1;
    let mut alpha = empirical_cdf_alpha(index, link)?;
    let mut beta = vec![0.0; p];

    let mut pass = likelihood_pass(&alpha, &beta, data, index, link)
        .ok_or(CpmError::NonFiniteLikelihood)?;
    let mut diag = FitDiagnostics {
        nll_trace: vec![pass.nll],
        tail_clamped: pass.tail_clamped,
        ..FitDiagnostics::default()
    };
    let mut converged = false;
    let mut iterations = 0usize;

    loop {
        diag.max_score = max_abs(&pass.score);
        if diag.max_score < opts.score_tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }

        let factor = StructuredFactor::factor(&pass.hessian)?;
        let direction = factor.solve(&pass.score);

        // Newton decrement: the quadratic model's remaining improvement is
        // ½·sᵀd. Once that falls below the relative log-likelihood
        // tolerance no representable step can help, which is exactly the
        // ll-change convergence criterion.
        let predicted_drop = 0.5 * pass.score.dot(&direction);
        if predicted_drop <= opts.ll_tol * (pass.nll.abs() + 1.0) {
            converged = true;
            break;
        }

        let mut lambda = 1.0;
        let mut accepted: Option<(Vec<f64>, Vec<f64>, f64)> = None;
        for halving in 0..=opts.max_step_halvings {
            let cand_alpha: Vec<f64> = alpha
                .iter()
                .enumerate()
                .map(|(j, &a)| a + lambda * direction[j])
                .collect();
            let cand_beta: Vec<f64> = beta
                .iter()
                .enumerate()
                .map(|(k, &b)| b + lambda * direction[ma + k])
                .collect();
            let nll_new = nll_unchecked(&cand_alpha, &cand_beta, data, index, link);
            if nll_new < pass.nll {
                diag.halvings += halving;
                accepted = Some((cand_alpha, cand_beta, nll_new));
                break;
            }
            lambda *= 0.5;
        }

        let (new_alpha, new_beta, _) = match accepted {
            Some(step) => step,
            None => {
                diag.line_search_failed = true;
                break;
            }
        };
        alpha = new_alpha;
        beta = new_beta;
        iterations += 1;

        let worst = alpha
            .iter()
            .chain(beta.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if worst > opts.param_bound {
            return Err(CpmError::Separation {
                bound: opts.param_bound,
                iteration: iterations,
            });
        }

        let new_pass = likelihood_pass(&alpha, &beta, data, index, link)
            .ok_or(CpmError::NonFiniteLikelihood)?;
        let ll_change = (pass.nll - new_pass.nll).abs() / (pass.nll.abs() + 1.0);
        pass = new_pass;
        diag.tail_clamped |= pass.tail_clamped;
        diag.nll_trace.push(pass.nll);
        if ll_change < opts.ll_tol {
            diag.max_score = max_abs(&pass.score);
            converged = true;
            break;
        }
    }

    let (alpha_var, beta_cov) = match variance(&pass.hessian) {
        Ok(v) => v,
        Err(e) if converged => return Err(e),
        Err(_) => (vec![f64::NAN; ma], Array2::from_elem((p, p), f64::NAN)),
    };

    Ok(CpmFit {
        alpha,
        beta: Array1::from_vec(beta),
        alpha_var,
        beta_cov,
        loglik: -pass.nll,
        iterations,
        converged,
        distinct: index.distinct().to_vec(),
        link,
        diagnostics: diag,
    })
}
