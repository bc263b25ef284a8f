//! Input data containers: an outcome vector with a dense predictor matrix,
//! and the ordinal index mapping each observation to its outcome category.

use ndarray::{Array1, Array2};

use crate::error::{CpmError, Result};

/// A regression dataset: outcome vector `y` of length `n` and predictor
/// matrix `x` of shape `n × p`. `p = 0` (no covariates) is allowed.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub y: Array1<f64>,
    pub x: Array2<f64>,
}

impl Dataset {
    pub fn new(y: Array1<f64>, x: Array2<f64>) -> Result<Self> {
        if y.len() < 2 {
            return Err(CpmError::TooFewObservations {
                needed: 2,
                got: y.len(),
            });
        }
        if x.nrows() != y.len() {
            return Err(CpmError::DimensionMismatch {
                context: "predictor matrix rows vs outcome length",
                expected: y.len(),
                got: x.nrows(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(CpmError::NonFinite {
                context: "outcome vector",
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CpmError::NonFinite {
                context: "predictor matrix",
            });
        }
        Ok(Dataset { y, x })
    }

    /// Dataset with no predictors (intercept-only model).
    pub fn outcome_only(y: Array1<f64>) -> Result<Self> {
        let n = y.len();
        Dataset::new(y, Array2::zeros((n, 0)))
    }

    /// Subset of rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let y = Array1::from_iter(rows.iter().map(|&i| self.y[i]));
        let mut x = Array2::zeros((rows.len(), self.p()));
        for (out, &i) in rows.iter().enumerate() {
            x.row_mut(out).assign(&self.x.row(i));
        }
        Dataset { y, x }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

/// Sorted distinct outcome values plus each observation's category rank.
///
/// Ranks are 0-based internally: `rank[i] ∈ 0..m` is the position of `y[i]`
/// in `distinct`. Ties are exact-equality ties; no tolerance is applied.
#[derive(Debug, Clone)]
pub struct OutcomeIndex {
    distinct: Vec<f64>,
    rank: Vec<u32>,
}

impl OutcomeIndex {
    /// Sorted distinct outcome values (the `m` category labels).
    pub fn distinct(&self) -> &[f64] {
        &self.distinct
    }

    /// Per-observation 0-based category rank.
    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    /// Number of distinct outcome values.
    pub fn m(&self) -> usize {
        self.distinct.len()
    }

    /// Observation count per category rank.
    pub fn category_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.m()];
        for &r in &self.rank {
            counts[r as usize] += 1;
        }
        counts
    }
}

/// Index a finite outcome vector into ordinal categories.
pub fn index_outcomes(y: &[f64]) -> Result<OutcomeIndex> {
    if y.len() < 2 {
        return Err(CpmError::TooFewObservations {
            needed: 2,
            got: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(CpmError::NonFinite {
            context: "outcome vector",
        });
    }
    let mut distinct: Vec<f64> = y.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(CpmError::DegenerateOutcome { n: y.len() });
    }
    let rank = y
        .iter()
        .map(|v| {
            distinct
                .binary_search_by(|probe| probe.partial_cmp(v).unwrap())
                .expect("every observation is present in the distinct grid") as u32
        })
        .collect();
    Ok(OutcomeIndex { distinct, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn indexes_with_ties() {
        let idx = index_outcomes(&[3.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(idx.distinct(), &[1.0, 2.0, 3.0]);
        assert_eq!(idx.ranks(), &[2, 0, 2, 1]);
        assert_eq!(idx.m(), 3);
        assert_eq!(idx.category_counts(), vec![1, 1, 2]);
    }

    #[test]
    fn single_distinct_value_is_degenerate() {
        let err = index_outcomes(&[5.5, 5.5, 5.5, 5.5]).unwrap_err();
        assert!(matches!(err, CpmError::DegenerateOutcome { n: 4 }));
    }

    #[test]
    fn all_distinct_yields_m_equal_n() {
        let y: Vec<f64> = (0..15).map(|i| 10.0 + i as f64 * 0.7).collect();
        let idx = index_outcomes(&y).unwrap();
        assert_eq!(idx.m(), 15);
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(array![1.0, 2.0], array![[1.0], [f64::NAN]]).is_err());
        assert!(Dataset::new(array![1.0], Array2::zeros((1, 0))).is_err());
        assert!(Dataset::new(array![1.0, 2.0], Array2::zeros((3, 2))).is_err());
        let d = Dataset::outcome_only(array![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d.p(), 0);
        assert_eq!(d.n(), 3);
    }

    #[test]
    fn select_rows_preserves_order() {
        let d = Dataset::new(
            array![1.0, 2.0, 3.0, 4.0],
            array![[10.0], [20.0], [30.0], [40.0]],
        )
        .unwrap();
        let s = d.select_rows(&[2, 0]);
        assert_eq!(s.y.as_slice().unwrap(), &[3.0, 1.0]);
        assert_eq!(s.x[[0, 0]], 30.0);
        assert_eq!(s.x[[1, 0]], 10.0);
    }
}
