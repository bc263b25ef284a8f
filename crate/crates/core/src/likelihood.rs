//! Nonparametric log-likelihood of the cumulative probability model, with
//! analytic score and structured Hessian.
//!
//! Each observation in category `r` (0-based rank) contributes
//! `log{F_ε(α_r − βᵀx) − F_ε(α_{r−1} − βᵀx)}`, with the conventions
//! `α_{−1} = −∞` and `α_{M−1} = +∞`. Because a term touches at most the two
//! adjacent alpha parameters, the alpha block of the Hessian is exactly
//! tridiagonal; only that band, the `(M−1)×p` cross block, and the `p×p`
//! beta block are ever stored.

use ndarray::{Array1, Array2};

use crate::data::{Dataset, OutcomeIndex};
use crate::error::{CpmError, Result};
use crate::link::LinkFamily;

/// Symmetric `(M−1+p) × (M−1+p)` Hessian of the log-likelihood, stored by
/// structure: tridiagonal alpha band, dense cross block, dense beta block.
#[derive(Debug, Clone)]
pub struct StructuredHessian {
    /// Main diagonal of the alpha block, length `M−1`.
    pub alpha_diag: Vec<f64>,
    /// First off-diagonal of the alpha block, length `M−2`.
    pub alpha_offdiag: Vec<f64>,
    /// Alpha–beta cross block, `(M−1) × p`.
    pub cross: Array2<f64>,
    /// Beta block, `p × p`.
    pub beta_block: Array2<f64>,
}

impl StructuredHessian {
    pub fn n_alpha(&self) -> usize {
        self.alpha_diag.len()
    }

    pub fn n_beta(&self) -> usize {
        self.beta_block.nrows()
    }

    /// Materialize the full dense matrix. Intended for small-problem
    /// diagnostics and oracle tests; fitting never calls this.
    pub fn to_dense(&self) -> Array2<f64> {
        let ma = self.n_alpha();
        let p = self.n_beta();
        let dim = ma + p;
        let mut h = Array2::zeros((dim, dim));
        for j in 0..ma {
            h[[j, j]] = self.alpha_diag[j];
            if j + 1 < ma {
                h[[j, j + 1]] = self.alpha_offdiag[j];
                h[[j + 1, j]] = self.alpha_offdiag[j];
            }
            for k in 0..p {
                h[[j, ma + k]] = self.cross[[j, k]];
                h[[ma + k, j]] = self.cross[[j, k]];
            }
        }
        for a in 0..p {
            for b in 0..p {
                h[[ma + a, ma + b]] = self.beta_block[[a, b]];
            }
        }
        h
    }
}

/// Pointwise link evaluations at one observation's two cut points.
struct TermEval {
    prob: f64,
    f_lo: f64,
    f_hi: f64,
    fp_lo: f64,
    fp_hi: f64,
    clamped: bool,
}

/// Evaluate the category probability and link derivatives for an observation
/// with rank `rank` and linear predictor `eta`.
fn term_eval(link: LinkFamily, alpha: &[f64], rank: usize, eta: f64) -> TermEval {
    let m_minus_1 = alpha.len();
    let lo = if rank >= 1 {
        Some(alpha[rank - 1] - eta)
    } else {
        None
    };
    let hi = if rank < m_minus_1 {
        Some(alpha[rank] - eta)
    } else {
        None
    };
    let mut clamped = false;
    let prob = match (lo, hi) {
        (None, Some(b)) => {
            let (c, fl) = link.cdf_flagged(b);
            clamped |= fl;
            c
        }
        (Some(a), None) => link.sf(a),
        (Some(a), Some(b)) => {
            // Difference of CDFs; switch to the survival side when both cut
            // points sit in the upper tail to avoid cancellation against 1.
            if link.cdf(b) <= 0.5 {
                link.cdf(b) - link.cdf(a)
            } else {
                link.sf(a) - link.sf(b)
            }
        }
        (None, None) => unreachable!("M >= 2 by construction"),
    };
    TermEval {
        prob,
        f_lo: lo.map_or(0.0, |a| link.pdf(a)),
        f_hi: hi.map_or(0.0, |b| link.pdf(b)),
        fp_lo: lo.map_or(0.0, |a| link.pdf_deriv(a)),
        fp_hi: hi.map_or(0.0, |b| link.pdf_deriv(b)),
        clamped,
    }
}

fn validate_dims(alpha: &[f64], beta: &[f64], data: &Dataset, index: &OutcomeIndex) -> Result<()> {
    if alpha.len() != index.m() - 1 {
        return Err(CpmError::DimensionMismatch {
            context: "alpha length vs M−1",
            expected: index.m() - 1,
            got: alpha.len(),
        });
    }
    if beta.len() != data.p() {
        return Err(CpmError::DimensionMismatch {
            context: "beta length vs predictor count",
            expected: data.p(),
            got: beta.len(),
        });
    }
    if index.ranks().len() != data.n() {
        return Err(CpmError::DimensionMismatch {
            context: "outcome index vs dataset rows",
            expected: data.n(),
            got: index.ranks().len(),
        });
    }
    Ok(())
}

fn is_strictly_increasing(alpha: &[f64]) -> bool {
    alpha.windows(2).all(|w| w[0] < w[1])
}

/// Negative log-likelihood without precondition checks; returns `+∞` as soon
/// as any observation's category probability is non-positive (or the value
/// otherwise leaves the finite range). Step-halving relies on the sentinel.
pub(crate) fn nll_unchecked(
    alpha: &[f64],
    beta: &[f64],
    data: &Dataset,
    index: &OutcomeIndex,
    link: LinkFamily,
) -> f64 {
    let mut nll = 0.0;
    let beta_arr = Array1::from_vec(beta.to_vec());
    for (i, &rank) in index.ranks().iter().enumerate() {
        let eta = data.x.row(i).dot(&beta_arr);
        let term = term_eval(link, alpha, rank as usize, eta);
        if !(term.prob > 0.0) || !term.prob.is_finite() {
            return f64::INFINITY;
        }
        nll -= term.prob.ln();
    }
    if nll.is_nan() {
        f64::INFINITY
    } else {
        nll
    }
}

/// Negative log-likelihood `−Σᵢ log Pᵢ` at the given parameters.
pub fn neg_loglik(
    alpha: &[f64],
    beta: &[f64],
    data: &Dataset,
    index: &OutcomeIndex,
    link: LinkFamily,
) -> Result<f64> {
    validate_dims(alpha, beta, data, index)?;
    if !is_strictly_increasing(alpha) {
        return Err(CpmError::NonMonotoneAlpha);
    }
    Ok(nll_unchecked(alpha, beta, data, index, link))
}

/// Everything one Newton iteration needs from a single data pass.
pub(crate) struct LikelihoodPass {
    pub nll: f64,
    pub score: Array1<f64>,
    pub hessian: StructuredHessian,
    pub tail_clamped: bool,
}

/// Single pass accumulating the negative log-likelihood, the score of the
/// log-likelihood, and its structured Hessian. Returns `None` when some
/// category probability is non-positive.
pub(crate) fn likelihood_pass(
    alpha: &[f64],
    beta: &[f64],
    data: &Dataset,
    index: &OutcomeIndex,
    link: LinkFamily,
) -> Option<LikelihoodPass> {
    let ma = alpha.len();
    let p = data.p();
    let mut nll = 0.0;
    let mut score = Array1::<f64>::zeros(ma + p);
    let mut alpha_diag = vec![0.0; ma];
    let mut alpha_offdiag = vec![0.0; ma.saturating_sub(1)];
    let mut cross = Array2::<f64>::zeros((ma, p));
    let mut beta_block = Array2::<f64>::zeros((p, p));
    let mut tail_clamped = false;

    let beta_arr = Array1::from_vec(beta.to_vec());
    for (i, &rank) in index.ranks().iter().enumerate() {
        let rank = rank as usize;
        let xi = data.x.row(i);
        let eta = xi.dot(&beta_arr);
        let t = term_eval(link, alpha, rank, eta);
        if !(t.prob > 0.0) || !t.prob.is_finite() {
            return None;
        }
        tail_clamped |= t.clamped;
        nll -= t.prob.ln();

        let inv_p = 1.0 / t.prob;
        let g_hi = t.f_hi * inv_p;
        let g_lo = t.f_lo * inv_p;
        let df = (t.f_hi - t.f_lo) * inv_p;

        if rank < ma {
            score[rank] += g_hi;
            alpha_diag[rank] += t.fp_hi * inv_p - g_hi * g_hi;
            let c_hi = -t.fp_hi * inv_p + g_hi * df;
            for k in 0..p {
                cross[[rank, k]] += c_hi * xi[k];
            }
        }
        if rank >= 1 {
            let lo_idx = rank - 1;
            score[lo_idx] -= g_lo;
            alpha_diag[lo_idx] += -t.fp_lo * inv_p - g_lo * g_lo;
            let c_lo = t.fp_lo * inv_p - g_lo * df;
            for k in 0..p {
                cross[[lo_idx, k]] += c_lo * xi[k];
            }
        }
        if rank >= 1 && rank < ma {
            alpha_offdiag[rank - 1] += g_hi * g_lo;
        }

        if p > 0 {
            let w = (t.fp_hi - t.fp_lo) * inv_p - df * df;
            for a in 0..p {
                score[ma + a] -= df * xi[a];
                for b in a..p {
                    beta_block[[a, b]] += w * xi[a] * xi[b];
                }
            }
        }
    }
    // Mirror the upper triangle of the beta block.
    for a in 0..p {
        for b in 0..a {
            beta_block[[a, b]] = beta_block[[b, a]];
        }
    }
    Some(LikelihoodPass {
        nll,
        score,
        hessian: StructuredHessian {
            alpha_diag,
            alpha_offdiag,
            cross,
            beta_block,
        },
        tail_clamped,
    })
}

/// Score (gradient of the log-likelihood) and structured Hessian.
pub fn derivatives(
    alpha: &[f64],
    beta: &[f64],
    data: &Dataset,
    index: &OutcomeIndex,
    link: LinkFamily,
) -> Result<(Array1<f64>, StructuredHessian)> {
    validate_dims(alpha, beta, data, index)?;
    if !is_strictly_increasing(alpha) {
        return Err(CpmError::NonMonotoneAlpha);
    }
    match likelihood_pass(alpha, beta, data, index, link) {
        Some(pass) => Ok((pass.score, pass.hessian)),
        None => Err(CpmError::NonFiniteLikelihood),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::index_outcomes;
    use crate::fit::empirical_cdf_alpha;
    use ndarray::Array2;
    use rand::Rng;

    fn bernoulli_data() -> (Dataset, OutcomeIndex) {
        let mut y = vec![0.0; 3];
        y.extend(vec![1.0; 7]);
        let index = index_outcomes(&y).unwrap();
        let data = Dataset::outcome_only(Array1::from_vec(y)).unwrap();
        (data, index)
    }

    #[test]
    fn bernoulli_neg_loglik() {
        let (data, index) = bernoulli_data();
        let alpha = [(0.3f64 / 0.7).ln()];
        let nll = neg_loglik(&alpha, &[], &data, &index, LinkFamily::Logit).unwrap();
        let expected = -(3.0 * 0.3f64.ln() + 7.0 * 0.7f64.ln());
        assert!((nll - expected).abs() < 1e-12, "nll={nll} want={expected}");
    }

    #[test]
    fn non_monotone_alpha_is_a_precondition_violation() {
        let y: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let index = index_outcomes(&y).unwrap();
        let data = Dataset::outcome_only(Array1::from_vec(y)).unwrap();
        let alpha = [0.0, -0.5, 0.5, 1.0, 2.0];
        let err = neg_loglik(&alpha, &[], &data, &index, LinkFamily::Logit).unwrap_err();
        assert!(matches!(err, CpmError::NonMonotoneAlpha));
    }

    /// Independent naive multinomial evaluation: plain CDF differences per
    /// observation, no survival-side branch, no shared code path.
    fn naive_multinomial_nll(
        alpha: &[f64],
        beta: &[f64],
        data: &Dataset,
        index: &OutcomeIndex,
        link: LinkFamily,
    ) -> f64 {
        let ma = alpha.len();
        let mut nll = 0.0;
        for (i, &rank) in index.ranks().iter().enumerate() {
            let rank = rank as usize;
            let mut eta = 0.0;
            for k in 0..beta.len() {
                eta += beta[k] * data.x[[i, k]];
            }
            let upper = if rank < ma {
                link.cdf(alpha[rank] - eta)
            } else {
                1.0
            };
            let lower = if rank >= 1 {
                link.cdf(alpha[rank - 1] - eta)
            } else {
                0.0
            };
            nll -= (upper - lower).ln();
        }
        nll
    }

    fn random_instance(
        seed: u64,
        n: usize,
        categories: usize,
        p: usize,
    ) -> (Dataset, OutcomeIndex, Vec<f64>, Vec<f64>) {
        let mut rng = crate::rng::stream_rng(seed, crate::rng::Stream::MonteCarlo);
        let y: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0..categories) as f64 * 0.5 - 1.0)
            .collect();
        let mut x = Array2::zeros((n, p));
        for i in 0..n {
            for k in 0..p {
                x[[i, k]] = crate::rng::standard_normal(&mut rng) * 0.7;
            }
        }
        let index = index_outcomes(&y).unwrap();
        let data = Dataset::new(Array1::from_vec(y), x).unwrap();
        let m = index.m();
        let alpha = empirical_cdf_alpha(&index, LinkFamily::Logit).unwrap();
        let beta: Vec<f64> = (0..p).map(|k| 0.2 * (k as f64 + 1.0)).collect();
        assert_eq!(alpha.len(), m - 1);
        (data, index, alpha, beta)
    }

    #[test]
    fn matches_naive_multinomial_oracle() {
        let (data, index, alpha, beta) = random_instance(3, 100, 8, 3);
        let ours = neg_loglik(&alpha, &beta, &data, &index, LinkFamily::Logit).unwrap();
        let naive = naive_multinomial_nll(&alpha, &beta, &data, &index, LinkFamily::Logit);
        assert!((ours - naive).abs() < 1e-10, "ours={ours} naive={naive}");
    }

    #[test]
    fn score_vanishes_at_no_covariate_mle() {
        let y = vec![1.0, 1.0, 2.0, 2.0, 2.0, 5.0, 7.0, 7.0, 7.0, 7.0];
        let index = index_outcomes(&y).unwrap();
        let data = Dataset::outcome_only(Array1::from_vec(y)).unwrap();
        for link in [LinkFamily::Logit, LinkFamily::Probit, LinkFamily::CLogLog] {
            let alpha = empirical_cdf_alpha(&index, link).unwrap();
            let (score, _) = derivatives(&alpha, &[], &data, &index, link).unwrap();
            let max = score.iter().fold(0.0f64, |m, s| m.max(s.abs()));
            assert!(max < 1e-8, "{link}: max score {max}");
        }
    }

    fn fd_gradient_of_nll(
        alpha: &[f64],
        beta: &[f64],
        data: &Dataset,
        index: &OutcomeIndex,
        link: LinkFamily,
    ) -> Vec<f64> {
        let ma = alpha.len();
        let dim = ma + beta.len();
        let mut theta: Vec<f64> = alpha.iter().chain(beta.iter()).copied().collect();
        let mut grad = vec![0.0; dim];
        for j in 0..dim {
            let h = 1e-6 * theta[j].abs().max(1.0);
            let orig = theta[j];
            theta[j] = orig + h;
            let up = nll_unchecked(&theta[..ma], &theta[ma..], data, index, link);
            theta[j] = orig - h;
            let dn = nll_unchecked(&theta[..ma], &theta[ma..], data, index, link);
            theta[j] = orig;
            grad[j] = (up - dn) / (2.0 * h);
        }
        grad
    }

    #[test]
    fn score_matches_finite_differences() {
        for link in [
            LinkFamily::Logit,
            LinkFamily::Probit,
            LinkFamily::LogLog,
            LinkFamily::CLogLog,
        ] {
            let (data, index, alpha, beta) = random_instance(17, 50, 10, 3);
            let (score, _) = derivatives(&alpha, &beta, &data, &index, link).unwrap();
            let fd = fd_gradient_of_nll(&alpha, &beta, &data, &index, link);
            let scale = score.iter().fold(1.0f64, |m, s| m.max(s.abs()));
            for j in 0..score.len() {
                // score is the gradient of +loglik, fd of −loglik
                let diff = (score[j] + fd[j]).abs();
                assert!(
                    diff / scale < 1e-5,
                    "{link} coord {j}: analytic {}, fd {}",
                    score[j],
                    -fd[j]
                );
            }
        }
    }

    #[test]
    fn hessian_matches_finite_differences_of_score() {
        for link in [
            LinkFamily::Logit,
            LinkFamily::Probit,
            LinkFamily::LogLog,
            LinkFamily::CLogLog,
        ] {
            let (data, index, alpha, beta) = random_instance(29, 50, 10, 3);
            let ma = alpha.len();
            let dim = ma + beta.len();
            let (_, hess) = derivatives(&alpha, &beta, &data, &index, link).unwrap();
            let dense = hess.to_dense();
            let mut theta: Vec<f64> = alpha.iter().chain(beta.iter()).copied().collect();
            let scale = dense.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for j in 0..dim {
                let h = 1e-6 * theta[j].abs().max(1.0);
                let orig = theta[j];
                theta[j] = orig + h;
                let (s_up, _) =
                    derivatives(&theta[..ma], &theta[ma..], &data, &index, link).unwrap();
                theta[j] = orig - h;
                let (s_dn, _) =
                    derivatives(&theta[..ma], &theta[ma..], &data, &index, link).unwrap();
                theta[j] = orig;
                for i in 0..dim {
                    let fd = (s_up[i] - s_dn[i]) / (2.0 * h);
                    assert!(
                        (fd - dense[[i, j]]).abs() / scale < 1e-4,
                        "{link} H[{i},{j}]: analytic {}, fd {fd}",
                        dense[[i, j]]
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_block_is_tridiagonal() {
        let (data, index, alpha, beta) = random_instance(5, 80, 12, 2);
        let (_, hess) = derivatives(&alpha, &beta, &data, &index, LinkFamily::Logit).unwrap();
        assert_eq!(hess.alpha_diag.len(), index.m() - 1);
        assert_eq!(hess.alpha_offdiag.len(), index.m() - 2);
        // Off-band curvature is structurally zero: perturbing α_j must not
        // change the score of α_k for |j−k| ≥ 2. Spot-check via dense FD.
        let ma = alpha.len();
        let mut a2 = alpha.clone();
        let h = 1e-6;
        a2[0] += h;
        let (s_up, _) = derivatives(&a2, &beta, &data, &index, LinkFamily::Logit).unwrap();
        a2[0] = alpha[0] - h;
        let (s_dn, _) = derivatives(&a2, &beta, &data, &index, LinkFamily::Logit).unwrap();
        for k in 2..ma {
            let fd = (s_up[k] - s_dn[k]) / (2.0 * h);
            assert!(fd.abs() < 1e-7, "unexpected coupling at (0,{k}): {fd}");
        }
    }
}
