//! Structured solver for the Newton system.
//!
//! The negated Hessian has the block form `[[T, C], [Cᵀ, B]]` with `T`
//! symmetric tridiagonal `(M−1)×(M−1)`, `C` of shape `(M−1)×p`, and `B` of
//! shape `p×p`. A Newton step factors `T = LDLᵀ` in O(M), forms the Schur
//! complement `S = B − Cᵀ T⁻¹ C` in O(Mp²), and never materializes the dense
//! `(M−1+p)²` matrix. The same factorization yields the beta covariance
//! `S⁻¹` and the alpha variances (diagonal of the full inverse) via the
//! tridiagonal inverse-diagonal recursion plus a rank-p correction.

use ndarray::{Array1, Array2};

use crate::error::{CpmError, Result};
use crate::likelihood::StructuredHessian;

/// LDLᵀ factorization of a symmetric positive-definite tridiagonal matrix.
#[derive(Debug)]
pub struct TridiagLdlt {
    /// Pivots of D.
    d: Vec<f64>,
    /// Unit subdiagonal of L, length `n − 1`.
    l: Vec<f64>,
}

impl TridiagLdlt {
    pub fn factor(diag: &[f64], offdiag: &[f64]) -> Result<Self> {
        let n = diag.len();
        assert_eq!(offdiag.len(), n.saturating_sub(1));
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        for j in 0..n {
            let mut pivot = diag[j];
            if j > 0 {
                pivot -= l[j - 1] * l[j - 1] * d[j - 1];
            }
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(CpmError::Singular { block: "alpha" });
            }
            d[j] = pivot;
            if j + 1 < n {
                l[j] = offdiag[j] / pivot;
            }
        }
        Ok(TridiagLdlt { d, l })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Solve `T x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n();
        assert_eq!(b.len(), n);
        for j in 1..n {
            b[j] -= self.l[j - 1] * b[j - 1];
        }
        for j in 0..n {
            b[j] /= self.d[j];
        }
        for j in (0..n.saturating_sub(1)).rev() {
            b[j] -= self.l[j] * b[j + 1];
        }
    }

    /// Diagonal of `T⁻¹` by the backward recursion
    /// `δ_n = 1/d_n`, `δ_j = 1/d_j + l_j² δ_{j+1}`.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.n();
        let mut delta = vec![0.0; n];
        if n == 0 {
            return delta;
        }
        delta[n - 1] = 1.0 / self.d[n - 1];
        for j in (0..n - 1).rev() {
            delta[j] = 1.0 / self.d[j] + self.l[j] * self.l[j] * delta[j + 1];
        }
        delta
    }
}

/// Lower-triangular Cholesky factor of a small dense SPD matrix.
pub struct Cholesky {
    lower: Array2<f64>,
}

impl Cholesky {
    pub fn factor(a: &Array2<f64>, block: &'static str) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(a.ncols(), n);
        let mut lower = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[[i, j]];
                for k in 0..j {
                    sum -= lower[[i, k]] * lower[[j, k]];
                }
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(CpmError::Singular { block });
                    }
                    lower[[i, j]] = sum.sqrt();
                } else {
                    lower[[i, j]] = sum / lower[[j, j]];
                }
            }
        }
        Ok(Cholesky { lower })
    }

    pub fn n(&self) -> usize {
        self.lower.nrows()
    }

    /// Forward solve `L w = b`.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut w = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let amt = self.lower[[i, k]] * w[k];
                w[i] -= amt;
            }
            w[i] /= self.lower[[i, i]];
        }
        w
    }

    /// Solve `L Lᵀ x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut x = self.forward(b);
        for i in (0..n).rev() {
            for k in i + 1..n {
                let amt = self.lower[[k, i]] * x[k];
                x[i] -= amt;
            }
            x[i] /= self.lower[[i, i]];
        }
        x
    }

    /// Full inverse (used only for p×p blocks).
    pub fn inverse(&self) -> Array2<f64> {
        let n = self.n();
        let mut inv = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv[[i, j]] = col[i];
            }
        }
        // Symmetrize against accumulated rounding.
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (inv[[i, j]] + inv[[j, i]]);
                inv[[i, j]] = v;
                inv[[j, i]] = v;
            }
        }
        inv
    }
}

/// Factorization of the negated structured Hessian `[[T, C], [Cᵀ, B]]`.
pub struct StructuredFactor {
    ldlt: TridiagLdlt,
    /// `C`, the negated cross block.
    c: Array2<f64>,
    /// `Z = T⁻¹ C`.
    z: Array2<f64>,
    /// Cholesky of the Schur complement `S = B − Cᵀ Z`.
    schur: Cholesky,
}

impl StructuredFactor {
    /// Factor `−H` for a Hessian of the log-likelihood (negative definite at
    /// and near the optimum).
    pub fn factor(h: &StructuredHessian) -> Result<Self> {
        let ma = h.n_alpha();
        let p = h.n_beta();
        let t_diag: Vec<f64> = h.alpha_diag.iter().map(|v| -v).collect();
        let t_off: Vec<f64> = h.alpha_offdiag.iter().map(|v| -v).collect();
        let ldlt = TridiagLdlt::factor(&t_diag, &t_off)?;

        let c = h.cross.mapv(|v| -v);
        let mut z = c.clone();
        let mut col = vec![0.0; ma];
        for k in 0..p {
            for j in 0..ma {
                col[j] = z[[j, k]];
            }
            ldlt.solve_in_place(&mut col);
            for j in 0..ma {
                z[[j, k]] = col[j];
            }
        }

        let mut s = h.beta_block.mapv(|v| -v);
        for a in 0..p {
            for b in 0..p {
                let mut acc = 0.0;
                for j in 0..ma {
                    acc += c[[j, a]] * z[[j, b]];
                }
                s[[a, b]] -= acc;
            }
        }
        // Symmetrize before factoring.
        for a in 0..p {
            for b in 0..a {
                let v = 0.5 * (s[[a, b]] + s[[b, a]]);
                s[[a, b]] = v;
                s[[b, a]] = v;
            }
        }
        let schur = Cholesky::factor(&s, "beta (Schur complement)")?;
        Ok(StructuredFactor { ldlt, c, z, schur })
    }

    pub fn n_alpha(&self) -> usize {
        self.ldlt.n()
    }

    pub fn n_beta(&self) -> usize {
        self.schur.n()
    }

    /// Solve `[[T, C], [Cᵀ, B]] x = rhs`.
    pub fn solve(&self, rhs: &Array1<f64>) -> Array1<f64> {
        let ma = self.n_alpha();
        let p = self.n_beta();
        assert_eq!(rhs.len(), ma + p);
        let mut u: Vec<f64> = rhs.iter().take(ma).copied().collect();
        self.ldlt.solve_in_place(&mut u);

        let mut rhs_beta = vec![0.0; p];
        for a in 0..p {
            let mut acc = rhs[ma + a];
            for j in 0..ma {
                acc -= self.c[[j, a]] * u[j];
            }
            rhs_beta[a] = acc;
        }
        let x_beta = self.schur.solve(&rhs_beta);

        let mut x = Array1::<f64>::zeros(ma + p);
        for j in 0..ma {
            let mut corr = 0.0;
            for k in 0..p {
                corr += self.z[[j, k]] * x_beta[k];
            }
            x[j] = u[j] - corr;
        }
        for a in 0..p {
            x[ma + a] = x_beta[a];
        }
        x
    }

    /// `p×p` covariance block of the inverse: `S⁻¹`.
    pub fn beta_covariance(&self) -> Array2<f64> {
        self.schur.inverse()
    }

    /// Diagonal of the alpha block of the full inverse:
    /// `diag(T⁻¹) + diag(Z S⁻¹ Zᵀ)`.
    pub fn alpha_variances(&self) -> Vec<f64> {
        let ma = self.n_alpha();
        let p = self.n_beta();
        let mut var = self.ldlt.inverse_diagonal();
        if p == 0 {
            return var;
        }
        let mut row = vec![0.0; p];
        for j in 0..ma {
            for k in 0..p {
                row[k] = self.z[[j, k]];
            }
            let w = self.schur.forward(&row);
            var[j] += w.iter().map(|v| v * v).sum::<f64>();
        }
        var
    }
}
