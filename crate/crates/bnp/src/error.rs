use affinity_core::{BSplineError, DensityError, MeasureError, TransformError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BnpError {
    #[error("invalid MCMC configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("outcome and covariate lengths differ ({ys} vs {xs})")]
    LengthMismatch { ys: usize, xs: usize },
    #[error("design has {got} columns, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("covariate {value} at index {index} lies outside [-1, 1]")]
    CovariateOutOfRange { index: usize, value: f64 },
    #[error("Cholesky factorization failed for {0} after jitter retries")]
    Cholesky(&'static str),
    #[error("inverse-Wishart update needs df > {min}, got {df}")]
    ImproperWishart { df: f64, min: f64 },
    #[error("diseased and non-diseased fits have different draw counts ({d} vs {nd})")]
    DrawCountMismatch { d: usize, nd: usize },
    #[error("draw is conditional but no covariate value was given, or vice versa")]
    CovariateUsage,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    BSpline(#[from] BSplineError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}
