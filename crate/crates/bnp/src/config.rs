use serde::{Deserialize, Serialize};

use crate::error::BnpError;

/// Chain length, thinning and Neal-8 auxiliary count for one fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcConfig {
    pub burn_in: usize,
    pub thin: usize,
    pub n_keep: usize,
    #[serde(default = "default_m_aux")]
    pub m_aux: usize,
    pub seed: u64,
}

fn default_m_aux() -> usize {
    3
}

impl McmcConfig {
    /// Settings used for the simulation study.
    pub fn simulation(seed: u64) -> Self {
        Self {
            burn_in: 2000,
            thin: 40,
            n_keep: 300,
            m_aux: 3,
            seed,
        }
    }

    /// Settings used for real-data fits.
    pub fn application(seed: u64) -> Self {
        Self {
            burn_in: 20_000,
            thin: 100,
            n_keep: 1800,
            m_aux: 3,
            seed,
        }
    }

    pub fn total_iterations(&self) -> usize {
        self.burn_in + self.thin * self.n_keep
    }

    pub fn validate(&self) -> Result<(), BnpError> {
        for (name, v) in [
            ("burn_in", self.burn_in),
            ("thin", self.thin),
            ("n_keep", self.n_keep),
            ("m_aux", self.m_aux),
        ] {
            if v == 0 {
                return Err(BnpError::InvalidConfig(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}
