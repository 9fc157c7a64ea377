//! Simulation scenarios: normal and normal-mixture arms, unconditional or
//! driven by a `Unif(-1, 1)` covariate, plus the separation trap.

use std::fmt;
use std::str::FromStr;

use affinity_core::{Density, DensityError, MixtureModel};
use serde::{Deserialize, Serialize};

use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioId {
    U1,
    U2,
    C1,
    C2,
    C3,
    #[serde(rename = "SEPTRAP")]
    Septrap,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        Self::U1,
        Self::U2,
        Self::C1,
        Self::C2,
        Self::C3,
        Self::Septrap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::U1 => "U1",
            Self::U2 => "U2",
            Self::C1 => "C1",
            Self::C2 => "C2",
            Self::C3 => "C3",
            Self::Septrap => "SEPTRAP",
        }
    }

    pub fn is_conditional(self) -> bool {
        matches!(self, Self::C1 | Self::C2 | Self::C3)
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SimError::UnknownScenario(s.to_string()))
    }
}

/// How the second argument of `phi(m, s)` in the scenario table is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadReading {
    #[default]
    StandardDeviation,
    Variance,
}

impl SpreadReading {
    /// Standard deviation implied by a written spread argument.
    pub fn sd(self, written: f64) -> f64 {
        match self {
            Self::StandardDeviation => written,
            Self::Variance => written.sqrt(),
        }
    }
}

/// Parameters of one sub-setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubParams {
    /// Diseased arm `phi(mu_d, sigma_d)`.
    Normal {
        mu_d: f64,
        sigma_d: f64,
    },
    /// Diseased arm `.7 phi(mu1, .2c) + .3 phi(mu2, .2c)`.
    Mixture {
        c: f64,
        mu1: f64,
        mu2: f64,
    },
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubSetting {
    pub index: usize,
    pub label: String,
    pub params: SubParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: ScenarioId,
    pub reading: SpreadReading,
}

const U1_MU: [f64; 3] = [0.8, 1.6, 3.2];
const U1_SIGMA: [f64; 3] = [0.8, 1.2, 1.6];
const U2_C: [f64; 3] = [0.6, 1.0, 1.6];
/// `(mu1, mu2)` per unit of `c`.
const U2_MEANS: [(f64, f64); 3] = [(0.2, 3.2), (1.1, 4.1), (2.0, 5.0)];

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

impl Scenario {
    pub fn new(id: ScenarioId) -> Self {
        Self {
            id,
            reading: SpreadReading::default(),
        }
    }

    pub fn with_reading(id: ScenarioId, reading: SpreadReading) -> Self {
        Self { id, reading }
    }

    pub fn is_conditional(&self) -> bool {
        self.id.is_conditional()
    }

    pub fn sub_settings(&self) -> Vec<SubSetting> {
        match self.id {
            ScenarioId::U1 => U1_MU
                .iter()
                .flat_map(|&mu_d| U1_SIGMA.iter().map(move |&sigma_d| (mu_d, sigma_d)))
                .enumerate()
                .map(|(index, (mu_d, sigma_d))| SubSetting {
                    index,
                    label: format!("mu_d={mu_d},sigma_d={sigma_d}"),
                    params: SubParams::Normal { mu_d, sigma_d },
                })
                .collect(),
            ScenarioId::U2 => U2_C
                .iter()
                .flat_map(|&c| U2_MEANS.iter().map(move |&(a, b)| (c, a * c, b * c)))
                .enumerate()
                .map(|(index, (c, mu1, mu2))| SubSetting {
                    index,
                    label: format!("c={c},mu1={mu1:.2},mu2={mu2:.2}"),
                    params: SubParams::Mixture { c, mu1, mu2 },
                })
                .collect(),
            _ => vec![SubSetting {
                index: 0,
                label: self.id.as_str().to_string(),
                params: SubParams::Fixed,
            }],
        }
    }

    fn normal(&self, mu: f64, spread: f64) -> Result<Density<f64>, DensityError> {
        Density::normal(mu, self.reading.sd(spread))
    }

    /// Outcome density of one arm; `x` is required exactly for conditional scenarios.
    pub fn density(
        &self,
        sub: &SubSetting,
        diseased: bool,
        x: Option<f64>,
    ) -> Result<Density<f64>, SimError> {
        if x.is_some() != self.is_conditional() {
            return Err(SimError::InvalidPlan(format!(
                "scenario {} {} a covariate value",
                self.id,
                if self.is_conditional() {
                    "needs"
                } else {
                    "takes no"
                }
            )));
        }
        let x = x.unwrap_or(0.0);
        let d = match (self.id, diseased, sub.params) {
            (ScenarioId::U1, false, _) => self.normal(0.4, 0.8)?,
            (ScenarioId::U1, true, SubParams::Normal { mu_d, sigma_d }) => {
                self.normal(mu_d, sigma_d)?
            }
            (ScenarioId::U2, false, _) => self.mixture(&[(0.7, 0.1, 0.2), (0.3, 3.1, 0.2)])?,
            (ScenarioId::U2, true, SubParams::Mixture { c, mu1, mu2 }) => {
                self.mixture(&[(0.7, mu1, 0.2 * c), (0.3, mu2, 0.2 * c)])?
            }
            (ScenarioId::C1, false, _) => self.normal(0.5 + x, 1.5)?,
            (ScenarioId::C1, true, _) => self.normal(2.0 + 4.0 * x, 2.0)?,
            (ScenarioId::C2, false, _) => {
                self.normal((std::f64::consts::PI * (x + 1.0)).sin(), 0.5)?
            }
            (ScenarioId::C2, true, _) => self.normal(0.5 + x * x, 1.0)?,
            (ScenarioId::C3, false, _) => self.normal(
                (std::f64::consts::PI * x).sin(),
                (0.2 + 0.5 * x.exp()).sqrt(),
            )?,
            (ScenarioId::C3, true, _) => {
                let (w1, w2) = c3_weights(x);
                self.mixture(&[(w1, x, 0.5), (w2, x * x * x, 1.0)])?
            }
            (ScenarioId::Septrap, true, _) => Density::mixture(
                vec![0.5, 0.5],
                vec![
                    Density::trunc_normal(-6.0, -4.0, -5.0, 1.0 / 3.0)?,
                    Density::trunc_normal(4.0, 6.0, 5.0, 1.0 / 3.0)?,
                ],
            )?,
            (ScenarioId::Septrap, false, _) => Density::trunc_normal(-2.0, 2.0, 0.0, 0.25)?,
            (id, _, p) => {
                return Err(SimError::InvalidPlan(format!(
                    "sub-setting {p:?} does not belong to scenario {id}"
                )))
            }
        };
        Ok(d)
    }

    fn mixture(&self, parts: &[(f64, f64, f64)]) -> Result<Density<f64>, DensityError> {
        let parts: Vec<(f64, f64, f64)> = parts
            .iter()
            .map(|&(w, m, s)| (w, m, self.reading.sd(s)))
            .collect();
        Ok(Density::Mixture(MixtureModel::normals(&parts)?))
    }
}

/// Covariate-dependent weights of the C3 diseased mixture.
pub fn c3_weights(x: f64) -> (f64, f64) {
    (logistic(x), logistic(-x))
}

/// `n` equispaced points on `[-1, 1]`.
pub fn default_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
