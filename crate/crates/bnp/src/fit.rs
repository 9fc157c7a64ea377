use std::sync::Arc;

use affinity_core::{standardize, BSplineBasis, Density, MixtureModel, RngStream, Standardization};
use rand::Rng;

use crate::config::McmcConfig;
use crate::error::BnpError;
use crate::prior::{BaseMeasureHyper, PriorSettings};
use crate::sampler::{initial_state, neal8_sweep};
use crate::state::{DataRows, DpmState};

/// Minimum sample size for [`fit_dpm`].
pub const MIN_DPM_OBS: usize = 10;
/// Minimum sample size for [`fit_ddp`].
pub const MIN_DDP_OBS: usize = 20;

/// One normal component of a predictive draw, on the standardized scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveComponent {
    pub weight: f64,
    pub beta: Vec<f64>,
    pub sigma: f64,
}

/// Posterior predictive density of a single kept MCMC iteration.
///
/// Components live on the standardized scale; [`mixture`](Self::mixture) and
/// [`mixture_at`](Self::mixture_at) return the original-scale density.
#[derive(Debug, Clone)]
pub struct PosteriorPredictiveDensity {
    components: Vec<PredictiveComponent>,
    standardization: Standardization<f64>,
    basis: Option<Arc<BSplineBasis<f64>>>,
    occupied: usize,
}

impl PosteriorPredictiveDensity {
    pub fn components(&self) -> &[PredictiveComponent] {
        &self.components
    }

    pub fn standardization(&self) -> Standardization<f64> {
        self.standardization
    }

    pub fn basis(&self) -> Option<&BSplineBasis<f64>> {
        self.basis.as_deref()
    }

    pub fn is_conditional(&self) -> bool {
        self.basis.is_some()
    }

    /// Occupied clusters in the sampler state this draw came from.
    pub fn occupied(&self) -> usize {
        self.occupied
    }

    /// Original-scale density of an unconditional draw.
    pub fn mixture(&self) -> Result<MixtureModel<f64>, BnpError> {
        if self.basis.is_some() {
            return Err(BnpError::CovariateUsage);
        }
        self.build(&[1.0], false)
    }

    /// Original-scale density at covariate `x` in `[-1, 1]`.
    pub fn mixture_at(&self, x: f64) -> Result<MixtureModel<f64>, BnpError> {
        let basis = self.basis.as_ref().ok_or(BnpError::CovariateUsage)?;
        let design = basis.design(x)?;
        self.build(&design, false)
    }

    /// Density on the standardized scale; `x` must be given iff conditional.
    pub fn standardized_mixture(&self, x: Option<f64>) -> Result<MixtureModel<f64>, BnpError> {
        match (&self.basis, x) {
            (None, None) => self.build(&[1.0], true),
            (Some(b), Some(x)) => self.build(&b.design(x)?, true),
            _ => Err(BnpError::CovariateUsage),
        }
    }

    /// Original-scale mixture for either kind of draw.
    pub fn density(&self, x: Option<f64>) -> Result<MixtureModel<f64>, BnpError> {
        match x {
            None => self.mixture(),
            Some(x) => self.mixture_at(x),
        }
    }

    fn build(&self, design: &[f64], standardized: bool) -> Result<MixtureModel<f64>, BnpError> {
        let (loc, scale) = if standardized {
            (0.0, 1.0)
        } else {
            (self.standardization.location, self.standardization.scale)
        };
        let mut weights = Vec::with_capacity(self.components.len());
        let mut comps = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let mu: f64 = design.iter().zip(&c.beta).map(|(a, b)| a * b).sum();
            weights.push(c.weight);
            comps.push(Density::normal(loc + scale * mu, scale * c.sigma)?);
        }
        Ok(MixtureModel::new(weights, comps)?)
    }
}

/// DP mixture of normals for a single sample.
pub fn fit_dpm(
    ys: &[f64],
    cfg: &McmcConfig,
    prior: &PriorSettings,
) -> Result<Vec<PosteriorPredictiveDensity>, BnpError> {
    if ys.len() < MIN_DPM_OBS {
        return Err(BnpError::TooFewObservations {
            needed: MIN_DPM_OBS,
            got: ys.len(),
        });
    }
    let (z, st) = standardize(ys)?;
    let rows = DataRows::intercept(z)?;
    run_chain(&rows, cfg, prior, st, None)
}

/// Single-weights DDP whose atom means are B-spline regressions on `xs`.
pub fn fit_ddp(
    ys: &[f64],
    xs: &[f64],
    cfg: &McmcConfig,
    prior: &PriorSettings,
    basis: &BSplineBasis<f64>,
) -> Result<Vec<PosteriorPredictiveDensity>, BnpError> {
    if ys.len() != xs.len() {
        return Err(BnpError::LengthMismatch {
            ys: ys.len(),
            xs: xs.len(),
        });
    }
    if ys.len() < MIN_DDP_OBS {
        return Err(BnpError::TooFewObservations {
            needed: MIN_DDP_OBS,
            got: ys.len(),
        });
    }
    if let Some((i, &x)) = xs
        .iter()
        .enumerate()
        .find(|(_, x)| !(-1.0..=1.0).contains(*x))
    {
        return Err(BnpError::CovariateOutOfRange { index: i, value: x });
    }
    let (z, st) = standardize(ys)?;
    let p = basis.dim();
    let mut design = vec![0.0; xs.len() * p];
    for (i, &x) in xs.iter().enumerate() {
        basis.design_into(x, &mut design[i * p..(i + 1) * p])?;
    }
    let rows = DataRows::new(z, design, p)?;
    run_chain(&rows, cfg, prior, st, Some(Arc::new(basis.clone())))
}

fn run_chain(
    rows: &DataRows,
    cfg: &McmcConfig,
    prior: &PriorSettings,
    st: Standardization<f64>,
    basis: Option<Arc<BSplineBasis<f64>>>,
) -> Result<Vec<PosteriorPredictiveDensity>, BnpError> {
    cfg.validate()?;
    prior.validate()?;
    let p = rows.dim();
    if prior.iwish_df.is_some_and(|df| df <= p as f64 + 1.0) {
        log::warn!(
            "inverse-Wishart prior with df = {} is improper or has no mean for dimension {p}",
            prior.iwish_df_for(p)
        );
    }
    log::debug!(
        "variance prior IG({}, b = {}), Sigma0 prior IW({}, I)",
        prior.ig_shape,
        prior.ig_scale(),
        prior.iwish_df_for(p)
    );
    let mut rng = RngStream::new(cfg.seed).rng();
    let hyper = BaseMeasureHyper::initial(p, prior)?;
    let mut state = initial_state(rows, hyper, prior.alpha, &mut rng)?;
    let mut draws = Vec::with_capacity(cfg.n_keep);
    for it in 1..=cfg.total_iterations() {
        neal8_sweep(&mut state, rows, cfg.m_aux, &mut rng)?;
        if it > cfg.burn_in && (it - cfg.burn_in).is_multiple_of(cfg.thin) {
            draws.push(predictive(&state, prior, st, basis.clone(), &mut rng));
        }
    }
    Ok(draws)
}

/// Occupied clusters weighted `n_j / (n + alpha)` plus `predictive_draws` fresh
/// `G0` atoms sharing `alpha / (n + alpha)`.
pub fn predictive<R: Rng + ?Sized>(
    state: &DpmState,
    prior: &PriorSettings,
    st: Standardization<f64>,
    basis: Option<Arc<BSplineBasis<f64>>>,
    rng: &mut R,
) -> PosteriorPredictiveDensity {
    let n = state.n_obs() as f64;
    let denom = n + state.alpha;
    let m = prior.predictive_draws;
    let mut components = Vec::with_capacity(state.occupied() + m);
    for c in state.clusters() {
        components.push(PredictiveComponent {
            weight: c.size() as f64 / denom,
            beta: c.beta().to_vec(),
            sigma: c.sigma2().sqrt(),
        });
    }
    let w0 = state.alpha / denom / m as f64;
    let mut beta = vec![0.0; state.hyper.dim()];
    for _ in 0..m {
        let s2 = state.hyper.draw_atom(rng, &mut beta);
        components.push(PredictiveComponent {
            weight: w0,
            beta: beta.clone(),
            sigma: s2.sqrt(),
        });
    }
    PosteriorPredictiveDensity {
        components,
        standardization: st,
        basis,
        occupied: state.occupied(),
    }
}

/// Pointwise posterior mean of the original-scale density on `ys`.
pub fn posterior_mean_density(
    draws: &[PosteriorPredictiveDensity],
    ys: &[f64],
    x: Option<f64>,
) -> Result<Vec<f64>, BnpError> {
    let mut acc = vec![0.0; ys.len()];
    for d in draws {
        let m = d.density(x)?;
        for (a, &y) in acc.iter_mut().zip(ys) {
            *a += m.pdf(y);
        }
    }
    let k = draws.len().max(1) as f64;
    Ok(acc.into_iter().map(|v| v / k).collect())
}
