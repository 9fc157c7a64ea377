use affinity_bnp::BnpError;
use affinity_core::{DatasetError, DensityError, MeasureError};
use affinity_sim::SimError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Data(_) | Self::Io { .. } => EXIT_DATA,
            Self::Numeric(_) => EXIT_NUMERIC,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        Self::Data(e.to_string())
    }
}

impl From<DensityError> for CliError {
    fn from(e: DensityError) -> Self {
        Self::Data(e.to_string())
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        Self::Numeric(e.to_string())
    }
}

impl From<BnpError> for CliError {
    fn from(e: BnpError) -> Self {
        match e {
            BnpError::TooFewObservations { .. }
            | BnpError::LengthMismatch { .. }
            | BnpError::CovariateOutOfRange { .. }
            | BnpError::Transform(_) => Self::Data(e.to_string()),
            BnpError::InvalidConfig(_) | BnpError::InvalidPrior(_) => Self::Usage(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::UnknownScenario(_) | SimError::InvalidPlan(_) => Self::Usage(e.to_string()),
            SimError::Bnp(b) => b.into(),
            SimError::Dataset(d) => d.into(),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Numeric(format!("serialization failed: {e}"))
    }
}
