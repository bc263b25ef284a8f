//! Semiparametric cumulative probability models (CPMs) for continuous
//! outcomes, fit by nonparametric maximum likelihood, plus three strategies
//! that keep fitting feasible on very large datasets:
//!
//! * **divide-and-combine** — partition the data, fit per-subset CPMs in
//!   parallel, align the alpha step functions and average;
//! * **equal-quantile binning** — collapse the outcome to `M_b` near-equal
//!   count bins labeled by their medians;
//! * **rounding with refinement** — round to a decimal place or to
//!   significant digits, with a refinement-level search targeting a desired
//!   number of distinct values.
//!
//! Conditional CDFs, PMFs, means, and medians are derived from any fitted
//! model, and a scenario simulator generates benchmark datasets with known
//! truth.

pub mod data;
pub mod discretize;
pub mod divide;
pub mod error;
pub mod fit;
pub mod inference;
pub mod likelihood;
pub mod link;
pub mod rng;
pub mod simulate;
pub mod solver;

pub use data::{index_outcomes, Dataset, OutcomeIndex};
pub use error::{CpmError, Result};
pub use fit::{fit_cpm, variance, CpmFit, FitDiagnostics, FitOptions};
pub use likelihood::{derivatives, neg_loglik, StructuredHessian};
pub use link::{LinkEval, LinkFamily};
