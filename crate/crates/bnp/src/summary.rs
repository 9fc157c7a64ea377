use affinity_core::{
    affinity, auc_mixture_normal, Density, QuadratureSettings, TestDirection, TestPair,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::BnpError;
use crate::fit::PosteriorPredictiveDensity;

/// Node budget for per-draw affinities; posterior mixtures are smooth enough
/// that this stays within 1e-7 of the 4096-node default.
pub const POSTERIOR_QUADRATURE_POINTS: usize = 1024;

pub fn posterior_quadrature() -> QuadratureSettings {
    QuadratureSettings {
        n_points: POSTERIOR_QUADRATURE_POINTS,
        ..QuadratureSettings::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureTag {
    Kappa,
    AucUpper,
    AucLower,
    Yi,
    Ovl,
}

impl MeasureTag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Kappa => "kappa",
            Self::AucUpper => "auc_upper",
            Self::AucLower => "auc_lower",
            Self::Yi => "yi",
            Self::Ovl => "ovl",
        }
    }

    pub fn auc(direction: TestDirection) -> Self {
        match direction {
            TestDirection::UpperTailed => Self::AucUpper,
            TestDirection::LowerTailed => Self::AucLower,
        }
    }
}

/// Posterior draws of one measure with pointwise mean and equal-tailed 95% band.
///
/// `draws[k][j]` is draw `k` at grid point `j`; a scalar summary has an empty
/// grid and one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracySummary {
    pub measure: MeasureTag,
    pub grid: Vec<f64>,
    pub draws: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub lo95: Vec<f64>,
    pub hi95: Vec<f64>,
}

impl AccuracySummary {
    pub fn from_draws(
        measure: MeasureTag,
        grid: Vec<f64>,
        draws: Vec<Vec<f64>>,
    ) -> Result<Self, BnpError> {
        let width = grid.len().max(1);
        if draws.is_empty() || draws.iter().any(|r| r.len() != width) {
            return Err(BnpError::InvalidConfig(format!(
                "summary needs at least one draw row of width {width}"
            )));
        }
        let k = draws.len() as f64;
        let mut mean = Vec::with_capacity(width);
        let mut lo95 = Vec::with_capacity(width);
        let mut hi95 = Vec::with_capacity(width);
        let mut col = Vec::with_capacity(draws.len());
        for j in 0..width {
            col.clear();
            col.extend(draws.iter().map(|r| r[j]));
            mean.push(col.iter().sum::<f64>() / k);
            col.sort_by(f64::total_cmp);
            lo95.push(percentile(&col, 0.025));
            hi95.push(percentile(&col, 0.975));
        }
        Ok(Self {
            measure,
            grid,
            draws,
            mean,
            lo95,
            hi95,
        })
    }

    pub fn is_scalar(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn n_draws(&self) -> usize {
        self.draws.len()
    }
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

fn check_pairing(
    d: &[PosteriorPredictiveDensity],
    nd: &[PosteriorPredictiveDensity],
) -> Result<(), BnpError> {
    if d.len() != nd.len() || d.is_empty() {
        return Err(BnpError::DrawCountMismatch {
            d: d.len(),
            nd: nd.len(),
        });
    }
    Ok(())
}

fn kappa_at(
    d: &PosteriorPredictiveDensity,
    nd: &PosteriorPredictiveDensity,
    x: Option<f64>,
    settings: QuadratureSettings,
) -> Result<f64, BnpError> {
    let pair = TestPair::new(
        Density::Mixture(d.density(x)?),
        Density::Mixture(nd.density(x)?),
    );
    Ok(affinity(&pair, &pair.spec(settings)?)?)
}

/// Per-draw `κ` between original-scale predictive densities; draws are paired
/// by iteration index.
pub fn posterior_affinity(
    d: &[PosteriorPredictiveDensity],
    nd: &[PosteriorPredictiveDensity],
    settings: QuadratureSettings,
) -> Result<AccuracySummary, BnpError> {
    check_pairing(d, nd)?;
    let draws = d
        .par_iter()
        .zip(nd)
        .map(|(a, b)| Ok(vec![kappa_at(a, b, None, settings)?]))
        .collect::<Result<Vec<_>, BnpError>>()?;
    AccuracySummary::from_draws(MeasureTag::Kappa, Vec::new(), draws)
}

/// Per-draw `κ(x)` on `xgrid` (rescaled covariate units).
pub fn posterior_affinity_conditional(
    d: &[PosteriorPredictiveDensity],
    nd: &[PosteriorPredictiveDensity],
    xgrid: &[f64],
    settings: QuadratureSettings,
) -> Result<AccuracySummary, BnpError> {
    check_pairing(d, nd)?;
    let draws = d
        .par_iter()
        .zip(nd)
        .map(|(a, b)| {
            xgrid
                .iter()
                .map(|&x| kappa_at(a, b, Some(x), settings))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, BnpError>>()?;
    AccuracySummary::from_draws(MeasureTag::Kappa, xgrid.to_vec(), draws)
}

/// Per-draw AUC from the closed form for normal mixtures; pointwise on `xgrid`
/// when given.
pub fn posterior_auc(
    d: &[PosteriorPredictiveDensity],
    nd: &[PosteriorPredictiveDensity],
    direction: TestDirection,
    xgrid: Option<&[f64]>,
) -> Result<AccuracySummary, BnpError> {
    check_pairing(d, nd)?;
    let points: Vec<Option<f64>> = match xgrid {
        None => vec![None],
        Some(g) => g.iter().map(|&x| Some(x)).collect(),
    };
    let draws = d
        .par_iter()
        .zip(nd)
        .map(|(a, b)| {
            points
                .iter()
                .map(|&x| {
                    Ok(auc_mixture_normal(
                        &a.density(x)?,
                        &b.density(x)?,
                        direction,
                    )?)
                })
                .collect::<Result<Vec<_>, BnpError>>()
        })
        .collect::<Result<Vec<_>, BnpError>>()?;
    AccuracySummary::from_draws(
        MeasureTag::auc(direction),
        xgrid.map(<[f64]>::to_vec).unwrap_or_default(),
        draws,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 1.0), 5.0);
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert!((percentile(&v, 0.025) - 1.1).abs() < 1e-12);
        assert_eq!(percentile(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn summary_bands_and_shape() {
        let draws: Vec<Vec<f64>> = (0..100).map(|k| vec![k as f64 / 100.0, 0.5]).collect();
        let s = AccuracySummary::from_draws(MeasureTag::Kappa, vec![0.0, 1.0], draws).unwrap();
        assert!((s.mean[0] - 0.495).abs() < 1e-12);
        assert_eq!((s.lo95[1], s.hi95[1]), (0.5, 0.5));
        assert!(s.lo95[0] <= s.mean[0] && s.mean[0] <= s.hi95[0]);
        assert!(
            AccuracySummary::from_draws(MeasureTag::Kappa, vec![], vec![vec![1.0, 2.0]]).is_err()
        );
    }
}
