//! Flat TOML run configuration, command defaults and the resolved settings
//! that are hashed and written next to every result.

use std::path::Path;

use affinity_bnp::{McmcConfig, PriorSettings, POSTERIOR_QUADRATURE_POINTS};
use affinity_core::TestDirection;
use affinity_sim::{to_json_string, SpreadReading};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Every key is optional; unset keys fall back to the command's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub n_keep: Option<usize>,
    pub m_aux: Option<usize>,
    pub ig_shape: Option<f64>,
    pub ig_rate: Option<f64>,
    pub ig_literal: Option<bool>,
    pub iwish_df: Option<f64>,
    pub alpha: Option<f64>,
    pub predictive_draws: Option<usize>,
    pub quadrature_points: Option<usize>,
    pub grid_points: Option<usize>,
    pub density_points: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<String>,
    pub y_col: Option<String>,
    pub d_col: Option<String>,
    pub x_col: Option<String>,
    pub direction: Option<TestDirection>,
    pub n_per_arm: Option<usize>,
    pub n_reps: Option<usize>,
    pub spread_reading: Option<SpreadReading>,
}

macro_rules! overlay_fields {
    ($base:expr, $top:expr, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// `self` with every key set in `top` replaced.
    pub fn overlay(mut self, top: &RunConfig) -> Self {
        overlay_fields!(
            self,
            top,
            seed,
            burn_in,
            thin,
            n_keep,
            m_aux,
            ig_shape,
            ig_rate,
            ig_literal,
            iwish_df,
            alpha,
            predictive_draws,
            quadrature_points,
            grid_points,
            density_points,
            threads,
            out,
            y_col,
            d_col,
            x_col,
            direction,
            n_per_arm,
            n_reps,
            spread_reading
        );
        self
    }

    pub fn mcmc(&self, defaults: McmcConfig) -> McmcConfig {
        McmcConfig {
            burn_in: self.burn_in.unwrap_or(defaults.burn_in),
            thin: self.thin.unwrap_or(defaults.thin),
            n_keep: self.n_keep.unwrap_or(defaults.n_keep),
            m_aux: self.m_aux.unwrap_or(defaults.m_aux),
            seed: self.seed.unwrap_or(defaults.seed),
        }
    }

    pub fn prior(&self) -> PriorSettings {
        let d = PriorSettings::default();
        PriorSettings {
            ig_shape: self.ig_shape.unwrap_or(d.ig_shape),
            ig_rate: self.ig_rate.unwrap_or(d.ig_rate),
            ig_literal: self.ig_literal.unwrap_or(d.ig_literal),
            iwish_df: self.iwish_df.or(d.iwish_df),
            alpha: self.alpha.unwrap_or(d.alpha),
            predictive_draws: self.predictive_draws.unwrap_or(d.predictive_draws),
        }
    }

    pub fn quadrature_points(&self) -> usize {
        self.quadrature_points
            .unwrap_or(POSTERIOR_QUADRATURE_POINTS)
    }
}

pub const DEFAULT_SEED: u64 = 20_240_901;
pub const DEFAULT_GRID_POINTS: usize = 21;
pub const DEFAULT_DENSITY_POINTS: usize = 512;

/// Settings that determine a `fit` result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSettings {
    pub y_col: String,
    pub d_col: String,
    pub x_col: Option<String>,
    pub mcmc: McmcConfig,
    pub prior: PriorSettings,
    pub direction: TestDirection,
    pub quadrature_points: usize,
    pub grid_points: usize,
    pub density_points: usize,
}

/// Settings that determine a `simulate` result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSettings {
    pub scenario: String,
    pub spread_reading: SpreadReading,
    pub n_per_arm: usize,
    pub n_reps: usize,
    pub mcmc: McmcConfig,
    pub prior: PriorSettings,
    pub grid_points: usize,
    pub quadrature_points: usize,
}

/// What `<stem>.resolved-config.json` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolved<S> {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub settings: S,
}

impl<S: Serialize> Resolved<S> {
    pub fn new(command: &str, master_seed: u64, settings: S) -> Result<Self, CliError> {
        let body = to_json_string(&(command, &settings))?;
        let digest = Sha256::digest(body.as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash,
            master_seed,
            settings,
        })
    }
}
