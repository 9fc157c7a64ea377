use affinity_bnp::BnpError;
use affinity_core::{DatasetError, DensityError, MeasureError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown scenario '{0}' (expected one of U1, U2, C1, C2, C3, SEPTRAP)")]
    UnknownScenario(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Bnp(#[from] BnpError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
