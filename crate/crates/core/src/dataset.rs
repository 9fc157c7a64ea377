//! Labelled biomarker data with an optional scalar covariate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::transform::{rescale_covariate, AffineMap, TransformError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("dataset has no rows")]
    Empty,
    #[error("row {row}: covariate must be all-or-none")]
    CovariateAllOrNone { row: usize },
    #[error("row {row}: non-finite value in column {column}")]
    NonFinite { row: usize, column: &'static str },
    #[error("{arm} arm has {got} rows, at least {needed} required")]
    ArmTooSmall {
        arm: &'static str,
        got: usize,
        needed: usize,
    },
    #[error("covariate: {0}")]
    Covariate(#[from] TransformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub y: f64,
    pub diseased: bool,
    pub x: Option<f64>,
}

/// Where the rows came from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub y_col: String,
    pub d_col: String,
    pub x_col: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<Observation>,
    provenance: Provenance,
    /// Pooled min/max map of the covariate onto [-1, 1].
    covariate_map: Option<AffineMap<f64>>,
}

pub fn arm_name(diseased: bool) -> &'static str {
    if diseased {
        "diseased"
    } else {
        "non-diseased"
    }
}

impl Dataset {
    /// Validates the rows; `row` numbers in errors are 1-based positions in `rows`.
    pub fn new(rows: Vec<Observation>, provenance: Provenance) -> Result<Self, DatasetError> {
        let first = rows.first().ok_or(DatasetError::Empty)?;
        let with_x = first.x.is_some();
        for (i, r) in rows.iter().enumerate() {
            let row = i + 1;
            if !r.y.is_finite() {
                return Err(DatasetError::NonFinite { row, column: "y" });
            }
            if r.x.is_some() != with_x {
                return Err(DatasetError::CovariateAllOrNone { row });
            }
            if matches!(r.x, Some(x) if !x.is_finite()) {
                return Err(DatasetError::NonFinite { row, column: "x" });
            }
        }
        let covariate_map = if with_x {
            let xs: Vec<f64> = rows.iter().filter_map(|r| r.x).collect();
            Some(rescale_covariate(&xs)?.1)
        } else {
            None
        };
        Ok(Self {
            rows,
            provenance,
            covariate_map,
        })
    }

    pub fn rows(&self) -> &[Observation] {
        &self.rows
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn has_covariate(&self) -> bool {
        self.covariate_map.is_some()
    }

    pub fn covariate_map(&self) -> Option<&AffineMap<f64>> {
        self.covariate_map.as_ref()
    }

    pub fn arm_count(&self, diseased: bool) -> usize {
        self.rows.iter().filter(|r| r.diseased == diseased).count()
    }

    pub fn require_per_arm(&self, needed: usize) -> Result<(), DatasetError> {
        for diseased in [true, false] {
            let got = self.arm_count(diseased);
            if got < needed {
                return Err(DatasetError::ArmTooSmall {
                    arm: arm_name(diseased),
                    got,
                    needed,
                });
            }
        }
        Ok(())
    }

    pub fn arm_outcomes(&self, diseased: bool) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.diseased == diseased)
            .map(|r| r.y)
            .collect()
    }

    /// Covariates of one arm in their original units.
    pub fn arm_covariates_raw(&self, diseased: bool) -> Option<Vec<f64>> {
        self.covariate_map?;
        Some(
            self.rows
                .iter()
                .filter(|r| r.diseased == diseased)
                .filter_map(|r| r.x)
                .collect(),
        )
    }

    /// Covariates of one arm mapped onto [-1, 1] with the pooled map.
    pub fn arm_covariates(&self, diseased: bool) -> Option<Vec<f64>> {
        let map = self.covariate_map?;
        Some(
            self.rows
                .iter()
                .filter(|r| r.diseased == diseased)
                .filter_map(|r| r.x.map(|x| map.apply(x)))
                .collect(),
        )
    }
}
