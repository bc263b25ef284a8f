use thiserror::Error;

/// Errors produced while validating data or fitting cumulative probability models.
#[derive(Debug, Error)]
pub enum CpmError {
    #[error("input contains a non-finite value ({context})")]
    NonFinite { context: &'static str },

    #[error("outcome vector must contain at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("outcome is degenerate: all {n} observations share a single distinct value")]
    DegenerateOutcome { n: usize },

    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("alpha vector must be strictly increasing")]
    NonMonotoneAlpha,

    #[error("likelihood is not finite at the supplied parameters")]
    NonFiniteLikelihood,

    #[error("apparent separation: parameter magnitude exceeded {bound} at iteration {iteration}")]
    Separation { bound: f64, iteration: usize },

    #[error("{block} block of the Hessian is singular or not positive definite")]
    Singular { block: &'static str },

    #[error("coefficient for column {column} is inestimable in subset {subset}: predictor is constant there")]
    InestimableCoefficient { column: usize, subset: usize },

    #[error("subset {subset} did not converge; refusing to combine")]
    SubsetNotConverged { subset: usize },

    #[error("subset outcome value {value} is missing from the global outcome grid")]
    InconsistentGrid { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, CpmError>;
