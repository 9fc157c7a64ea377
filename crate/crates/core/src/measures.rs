//! Summary measures of diagnostic accuracy for a pair of outcome densities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::{
    BetaParams, Density, DensityError, ExponentialParams, MixtureModel, NormalParams,
};
use crate::quadrature::{
    Layout, QuadratureError, QuadratureRule, QuadratureSettings, QuadratureSpec,
};
use crate::rng::RngStream;
use crate::scalar::Real;
use crate::special::{ln_beta, std_normal_cdf};

/// Default number of cutoffs scanned by [`youden`].
pub const DEFAULT_YOUDEN_GRID: usize = 10_000;
/// Smallest accepted Youden grid.
pub const MIN_YOUDEN_GRID: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error("{measure} evaluated to {value}, outside [0, 1] beyond tolerance")]
    OutOfRange { measure: &'static str, value: f64 },
    #[error("{0} density is not square integrable")]
    NotSquareIntegrable(&'static str),
    #[error(
        "squared-density integral did not converge on refinement (relative change {change:e})"
    )]
    NormNotConverged { change: f64 },
    #[error("closed-form mixture AUC requires every component to be normal")]
    NonNormalComponent,
    #[error("Youden grid needs at least {min} cutoffs, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("covariate {x} outside the declared domain [{lower}, {upper}]")]
    OutsideDomain { x: f64, lower: f64, upper: f64 },
    #[error("diseased density is positive at {at} where the non-diseased density vanishes")]
    UnboundedRatio { at: f64 },
    #[error("sample size must be at least 2")]
    SampleTooSmall,
}

/// Which tail of the marker indicates disease.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestDirection {
    /// Larger values indicate disease.
    #[default]
    UpperTailed,
    LowerTailed,
}

impl TestDirection {
    pub fn flipped(self) -> Self {
        match self {
            Self::UpperTailed => Self::LowerTailed,
            Self::LowerTailed => Self::UpperTailed,
        }
    }
}

/// Outcome densities of the diseased and non-diseased populations.
#[derive(Debug, Clone, PartialEq)]
pub struct TestPair<T> {
    pub f_d: Density<T>,
    pub f_nd: Density<T>,
}

impl<T: Real> TestPair<T> {
    pub fn new(f_d: Density<T>, f_nd: Density<T>) -> Self {
        Self { f_d, f_nd }
    }

    /// The pair with the roles of the two populations exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            f_d: self.f_nd.clone(),
            f_nd: self.f_d.clone(),
        }
    }

    /// Integration interval covering both densities, with the given node budget.
    pub fn spec(&self, settings: QuadratureSettings) -> Result<QuadratureSpec<T>, MeasureError> {
        let (lo, hi) = self.bounds();
        Ok(QuadratureSpec::with_settings(lo, hi, settings)?)
    }

    /// [`TestPair::spec`] with default settings.
    pub fn default_spec(&self) -> Result<QuadratureSpec<T>, MeasureError> {
        self.spec(QuadratureSettings::default())
    }

    fn bounds(&self) -> (T, T) {
        let (a, b) = self.f_d.integration_bounds();
        let (c, d) = self.f_nd.integration_bounds();
        (a.min(c), b.max(d))
    }

    fn layout(&self, spec: &QuadratureSpec<T>) -> Result<Layout<T>, MeasureError> {
        spec.validate()?;
        let mut hints = self.f_d.hints();
        hints.extend(self.f_nd.hints());
        Ok(Layout::from_hints(
            spec.lower,
            spec.upper,
            &hints,
            spec.settings(),
        )?)
    }

    fn values(&self, layout: &Layout<T>) -> (Vec<T>, Vec<T>) {
        let nodes = layout.nodes();
        (
            nodes.iter().map(|&y| self.f_d.pdf(y)).collect(),
            nodes.iter().map(|&y| self.f_nd.pdf(y)).collect(),
        )
    }
}

fn unit_tolerance<T: Real>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(1e3))
}

/// Two objective values closer than this count as tied.
fn tie_tolerance<T: Real>(v: T) -> T {
    T::epsilon() * T::lit(4.0) * v.abs().max(T::one())
}

/// Maps tiny excursions outside `[0, 1]` back onto it and rejects larger ones.
fn clamp_unit<T: Real>(measure: &'static str, v: T) -> Result<T, MeasureError> {
    let tol = unit_tolerance::<T>();
    if v >= T::zero() && v <= T::one() {
        Ok(v)
    } else if v < T::zero() && v >= -tol {
        Ok(T::zero())
    } else if v > T::one() && v <= T::one() + tol {
        Ok(T::one())
    } else {
        Err(MeasureError::OutOfRange {
            measure,
            value: v.as_f64(),
        })
    }
}

/// The curve `c(y) = sqrt(f_D(y) f_ND(y))` at the quadrature nodes.
pub fn affinity_curve<T: Real>(
    pair: &TestPair<T>,
    spec: &QuadratureSpec<T>,
) -> Result<(Vec<T>, Vec<T>), MeasureError> {
    let layout = pair.layout(spec)?;
    let (fd, fnd) = pair.values(&layout);
    let c = fd
        .iter()
        .zip(&fnd)
        .map(|(a, b)| a.sqrt() * b.sqrt())
        .collect();
    Ok((layout.nodes().to_vec(), c))
}

/// Hellinger affinity `∫ sqrt(f_D f_ND) dy`.
pub fn affinity<T: Real>(pair: &TestPair<T>, spec: &QuadratureSpec<T>) -> Result<T, MeasureError> {
    let layout = pair.layout(spec)?;
    let (fd, fnd) = pair.values(&layout);
    let c: Vec<T> = fd
        .iter()
        .zip(&fnd)
        .map(|(a, b)| a.sqrt() * b.sqrt())
        .collect();
    clamp_unit("affinity", layout.integrate_values(&c)?)
}

pub fn affinity_binormal<T: Real>(d: &NormalParams<T>, nd: &NormalParams<T>) -> T {
    let (sd, snd) = (d.sigma(), nd.sigma());
    let v = sd * sd + snd * snd;
    let delta = d.mu() - nd.mu();
    (T::lit(2.0) * sd * snd / v).sqrt() * (-(delta * delta) / (T::lit(4.0) * v)).exp()
}

pub fn affinity_bibeta<T: Real>(d: &BetaParams<T>, nd: &BetaParams<T>) -> T {
    let (ad, bd) = (d.a().as_f64(), d.b().as_f64());
    let (an, bn) = (nd.a().as_f64(), nd.b().as_f64());
    let ln = ln_beta(0.5 * (ad + an), 0.5 * (bd + bn)) - 0.5 * (ln_beta(ad, bd) + ln_beta(an, bn));
    T::lit(ln.exp().min(1.0))
}

pub fn affinity_biexponential<T: Real>(d: &ExponentialParams<T>, nd: &ExponentialParams<T>) -> T {
    let (a, b) = (d.lambda(), nd.lambda());
    T::lit(2.0) * (a * b).sqrt() / (a + b)
}

/// Normalized affinity `<f_D, f_ND> / (|f_D| |f_ND|)`.
///
/// Fails for densities that are not square integrable, and when the squared
/// norms change by more than 1e-6 (relative) after doubling the node budget.
pub fn affinity_normalized<T: Real>(
    pair: &TestPair<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, MeasureError> {
    for d in [&pair.f_d, &pair.f_nd] {
        if !d.is_square_integrable() {
            return Err(MeasureError::NotSquareIntegrable(d.family()));
        }
    }
    let products = |spec: &QuadratureSpec<T>| -> Result<(T, T, T), MeasureError> {
        let layout = pair.layout(spec)?;
        let (fd, fnd) = pair.values(&layout);
        let prod = |f: &dyn Fn(usize) -> T| -> Result<T, QuadratureError> {
            let v: Vec<T> = (0..fd.len()).map(f).collect();
            layout.integrate_values(&v)
        };
        Ok((
            prod(&|i| fd[i] * fnd[i])?,
            prod(&|i| fd[i] * fd[i])?,
            prod(&|i| fnd[i] * fnd[i])?,
        ))
    };
    let (inner, nd2, nnd2) = products(spec)?;
    let mut fine = *spec;
    fine.n_points *= 2;
    let (_, nd2_f, nnd2_f) = products(&fine)?;
    let change = ((nd2_f - nd2).abs() / nd2_f).max((nnd2_f - nnd2).abs() / nnd2_f);
    if !(change <= T::lit(1e-6)) {
        return Err(MeasureError::NormNotConverged {
            change: change.as_f64(),
        });
    }
    clamp_unit("normalized affinity", inner / (nd2 * nnd2).sqrt())
}

/// `P(Y_D > Y_ND)` (upper-tailed) or `P(Y_D < Y_ND)` (lower-tailed).
///
/// The CDF is obtained by cumulative composite-Simpson quadrature on the
/// same nodes as the density, whatever rule `spec` requests.
pub fn auc<T: Real>(
    pair: &TestPair<T>,
    direction: TestDirection,
    spec: &QuadratureSpec<T>,
) -> Result<T, MeasureError> {
    let mut simpson = *spec;
    simpson.rule = QuadratureRule::CompositeSimpson;
    let layout = pair.layout(&simpson)?;
    let (fd, fnd) = pair.values(&layout);
    // P(Y_f > Y_g) = ∫ f(y) G(y) dy
    let (f, g) = match direction {
        TestDirection::UpperTailed => (fd, fnd),
        TestDirection::LowerTailed => (fnd, fd),
    };
    let big_g = layout.cumulative(&g)?;
    let integrand: Vec<T> = f
        .iter()
        .zip(&big_g)
        .map(|(&fv, &gv)| fv * gv.max(T::zero()).min(T::one()))
        .collect();
    clamp_unit("AUC", layout.integrate_values(&integrand)?)
}

/// Closed-form AUC for two normal mixtures:
/// `Σ_h Σ_k π_h π_k Φ((μ_h - μ_k) / sqrt(σ_h² + σ_k²))`.
pub fn auc_mixture_normal<T: Real>(
    d: &MixtureModel<T>,
    nd: &MixtureModel<T>,
    direction: TestDirection,
) -> Result<T, MeasureError> {
    let dc = d
        .normal_components()
        .ok_or(MeasureError::NonNormalComponent)?;
    let nc = nd
        .normal_components()
        .ok_or(MeasureError::NonNormalComponent)?;
    let sign = match direction {
        TestDirection::UpperTailed => T::one(),
        TestDirection::LowerTailed => -T::one(),
    };
    let mut acc = T::zero();
    for (wd, pd) in &dc {
        for (wn, pn) in &nc {
            let s = (pd.sigma() * pd.sigma() + pn.sigma() * pn.sigma()).sqrt();
            acc += *wd * *wn * std_normal_cdf(sign * (pd.mu() - pn.mu()) / s);
        }
    }
    clamp_unit("AUC", acc)
}

/// Youden index, its smallest maximizing cutoff and all maximizing intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct YoudenResult<T> {
    pub yi: T,
    pub cutoff: T,
    /// Contiguous runs of grid cutoffs attaining the maximum (up to rounding).
    pub optimal_region: Vec<(T, T)>,
}

/// `max_c {F_ND(c) - F_D(c)}` (upper-tailed) or `max_c {F_D(c) - F_ND(c)}`.
pub fn youden<T: Real>(
    pair: &TestPair<T>,
    direction: TestDirection,
    grid_size: usize,
) -> Result<YoudenResult<T>, MeasureError> {
    let sign = match direction {
        TestDirection::UpperTailed => T::one(),
        TestDirection::LowerTailed => -T::one(),
    };
    youden_search(pair, grid_size, |c| {
        sign * (pair.f_nd.cdf(c) - pair.f_d.cdf(c))
    })
}

/// `max_c |F_ND(c) - F_D(c)|`, the direction-free variant.
pub fn youden_abs<T: Real>(
    pair: &TestPair<T>,
    grid_size: usize,
) -> Result<YoudenResult<T>, MeasureError> {
    youden_search(pair, grid_size, |c| {
        (pair.f_nd.cdf(c) - pair.f_d.cdf(c)).abs()
    })
}

fn youden_search<T: Real, F: Fn(T) -> T>(
    pair: &TestPair<T>,
    grid_size: usize,
    objective: F,
) -> Result<YoudenResult<T>, MeasureError> {
    if grid_size < MIN_YOUDEN_GRID {
        return Err(MeasureError::GridTooSmall {
            min: MIN_YOUDEN_GRID,
            got: grid_size,
        });
    }
    let (lo, hi) = pair.bounds();
    let step = (hi - lo) / T::lit((grid_size - 1) as f64);
    let grid: Vec<T> = (0..grid_size)
        .map(|i| {
            if i + 1 == grid_size {
                hi
            } else {
                lo + step * T::lit(i as f64)
            }
        })
        .collect();
    let vals: Vec<T> = grid.iter().map(|&c| objective(c)).collect();
    let best = vals.iter().copied().fold(T::neg_infinity(), T::max);
    let tol = tie_tolerance(best);

    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        if v >= best - tol {
            match runs.last_mut() {
                Some(run) if run.1 + 1 == i => run.1 = i,
                _ => runs.push((i, i)),
            }
        }
    }

    let (mut yi, mut cutoff) = (best, grid[runs[0].0]);
    let mut region: Vec<(T, T)> = runs.iter().map(|&(a, b)| (grid[a], grid[b])).collect();
    if runs.len() == 1 && runs[0].1 - runs[0].0 <= 2 {
        // isolated maximum: refine between the neighbouring cutoffs
        let (i, j) = runs[0];
        let a = grid[i.saturating_sub(1)];
        let b = grid[(j + 1).min(grid_size - 1)];
        let (c, v) = golden_max(&objective, a, b);
        if v > yi {
            yi = v;
            cutoff = c;
            region = vec![(c, c)];
        }
    }
    Ok(YoudenResult {
        yi: clamp_unit("Youden index", yi)?,
        cutoff,
        optimal_region: region,
    })
}

fn golden_max<T: Real, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T) -> (T, T) {
    let ratio = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Overlap coefficient `∫ min(f_D, f_ND) dy`.
pub fn ovl<T: Real>(pair: &TestPair<T>, spec: &QuadratureSpec<T>) -> Result<T, MeasureError> {
    let layout = pair.layout(spec)?;
    let (fd, fnd) = pair.values(&layout);
    let m: Vec<T> = fd.iter().zip(&fnd).map(|(a, b)| a.min(*b)).collect();
    clamp_unit("OVL", layout.integrate_values(&m)?)
}

/// Boxed map from a covariate value to a density.
pub type DensityFn<'a, T> = Box<dyn Fn(T) -> Result<Density<T>, DensityError> + Send + Sync + 'a>;

/// Covariate-indexed pair of outcome densities.
pub struct ConditionalTestPair<'a, T> {
    f_d: DensityFn<'a, T>,
    f_nd: DensityFn<'a, T>,
    domain: (T, T),
}

impl<'a, T: Real> ConditionalTestPair<'a, T> {
    pub fn new<FD, FND>(f_d: FD, f_nd: FND, domain: (T, T)) -> Self
    where
        FD: Fn(T) -> Result<Density<T>, DensityError> + Send + Sync + 'a,
        FND: Fn(T) -> Result<Density<T>, DensityError> + Send + Sync + 'a,
    {
        Self {
            f_d: Box::new(f_d),
            f_nd: Box::new(f_nd),
            domain,
        }
    }

    pub fn domain(&self) -> (T, T) {
        self.domain
    }

    /// The pair of densities at covariate value `x`.
    pub fn at(&self, x: T) -> Result<TestPair<T>, MeasureError> {
        let (lo, hi) = self.domain;
        if !(x >= lo && x <= hi) {
            return Err(MeasureError::OutsideDomain {
                x: x.as_f64(),
                lower: lo.as_f64(),
                upper: hi.as_f64(),
            });
        }
        Ok(TestPair::new((self.f_d)(x)?, (self.f_nd)(x)?))
    }
}

impl<T> std::fmt::Debug for ConditionalTestPair<'_, T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConditionalTestPair")
            .finish_non_exhaustive()
    }
}

/// `κ(x)` at each covariate value.
pub fn affinity_conditional<T: Real>(
    cpair: &ConditionalTestPair<'_, T>,
    xs: &[T],
    settings: QuadratureSettings,
) -> Result<Vec<T>, MeasureError> {
    xs.iter()
        .map(|&x| {
            let pair = cpair.at(x)?;
            affinity(&pair, &pair.spec(settings)?)
        })
        .collect()
}

/// `AUC(x)` at each covariate value.
pub fn auc_conditional<T: Real>(
    cpair: &ConditionalTestPair<'_, T>,
    xs: &[T],
    direction: TestDirection,
    settings: QuadratureSettings,
) -> Result<Vec<T>, MeasureError> {
    xs.iter()
        .map(|&x| {
            let pair = cpair.at(x)?;
            auc(&pair, direction, &pair.spec(settings)?)
        })
        .collect()
}

/// Monte Carlo estimate of `E_ND[sqrt(f_D(Y) / f_ND(Y))]` next to the quadrature affinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrIdentityCheck<T> {
    pub mc_estimate: T,
    pub std_error: T,
    pub quad_value: T,
}

pub fn affinity_lr_identity_check<T: Real>(
    pair: &TestPair<T>,
    n: usize,
    seed: u64,
) -> Result<LrIdentityCheck<T>, MeasureError> {
    if n < 2 {
        return Err(MeasureError::SampleTooSmall);
    }
    let mut rng = RngStream::new(seed).rng();
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for k in 0..n {
        let y = pair.f_nd.sample_one(&mut rng)?;
        let (fd, fnd) = (pair.f_d.pdf(y), pair.f_nd.pdf(y));
        let r = if fnd > T::zero() {
            (fd / fnd).sqrt().as_f64()
        } else if fd == T::zero() {
            0.0
        } else {
            return Err(MeasureError::UnboundedRatio { at: y.as_f64() });
        };
        let delta = r - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (r - mean);
    }
    let var = m2 / (n - 1) as f64;
    Ok(LrIdentityCheck {
        mc_estimate: T::lit(mean),
        std_error: T::lit((var / n as f64).sqrt()),
        quad_value: affinity(pair, &pair.default_spec()?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binormal(md: f64, sd: f64, mn: f64, sn: f64) -> TestPair<f64> {
        TestPair::new(
            Density::normal(md, sd).unwrap(),
            Density::normal(mn, sn).unwrap(),
        )
    }

    fn septrap() -> TestPair<f64> {
        let d = Density::mixture(
            vec![0.5, 0.5],
            vec![
                Density::trunc_normal(-6.0, -4.0, -5.0, 1.0 / 3.0).unwrap(),
                Density::trunc_normal(4.0, 6.0, 5.0, 1.0 / 3.0).unwrap(),
            ],
        )
        .unwrap();
        TestPair::new(d, Density::trunc_normal(-2.0, 2.0, 0.0, 0.25).unwrap())
    }

    #[test]
    fn binormal_affinity_matches_formula() {
        let p = binormal(2.0, 1.0, 0.0, 1.0);
        let k = affinity(&p, &p.default_spec().unwrap()).unwrap();
        assert!((k - (-0.5f64).exp()).abs() < 1e-10);
        let d = NormalParams::<f64>::new(2.0, 1.0).unwrap();
        let n = NormalParams::<f64>::new(0.0, 1.0).unwrap();
        assert!((affinity_binormal(&d, &n) - 0.606_530_659_712_633).abs() < 1e-14);
    }

    #[test]
    fn biexponential_example() {
        let d = ExponentialParams::<f64>::new(4.0).unwrap();
        let n = ExponentialParams::<f64>::new(1.0).unwrap();
        assert!((affinity_biexponential(&d, &n) - 0.8).abs() < 1e-15);
        let p = TestPair::new(Density::Exponential(d), Density::Exponential(n));
        let k = affinity(&p, &p.default_spec().unwrap()).unwrap();
        assert!((k - 0.8).abs() < 1e-8, "{k}");
    }

    #[test]
    fn separation_trap_values() {
        let p = septrap();
        let spec = p.default_spec().unwrap();
        assert!(affinity(&p, &spec).unwrap() <= 1e-6);
        assert!((auc(&p, TestDirection::UpperTailed, &spec).unwrap() - 0.5).abs() < 1e-3);
        let yi = youden(&p, TestDirection::UpperTailed, DEFAULT_YOUDEN_GRID).unwrap();
        assert!((yi.yi - 0.5).abs() < 1e-3);
        assert_eq!(yi.optimal_region.len(), 1);
        let (a, b) = yi.optimal_region[0];
        assert!(
            (1.9..2.002).contains(&a) && (b - 4.0).abs() < 2e-3,
            "{a} {b}"
        );
        let ya = youden_abs(&p, DEFAULT_YOUDEN_GRID).unwrap();
        assert!((ya.yi - 0.5).abs() < 1e-3);
        assert_eq!(ya.optimal_region.len(), 2);
        assert!(ovl(&p, &spec).unwrap() < 1e-12);
        assert!(affinity_normalized(&p, &spec).unwrap() < 1e-6);
    }

    #[test]
    fn binormal_youden_and_ovl() {
        let p = binormal(2.0, 1.0, 0.0, 1.0);
        let y = youden(&p, TestDirection::UpperTailed, DEFAULT_YOUDEN_GRID).unwrap();
        let truth = 2.0 * std_normal_cdf(1.0f64) - 1.0;
        assert!((y.yi - truth).abs() < 1e-12, "{} {} {:?}", y.yi, truth, y);
        assert!((y.cutoff - 1.0).abs() < 1e-6);
        let o = ovl(&p, &p.default_spec().unwrap()).unwrap();
        assert!((o - 2.0 * std_normal_cdf(-1.0f64)).abs() < 1e-8, "{o}");
        let kbar = affinity_normalized(&p, &p.default_spec().unwrap()).unwrap();
        assert!((kbar - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn auc_quadrature_and_closed_form() {
        let p = binormal(2.0, 1.0, 0.0, 1.0);
        let spec = p.default_spec().unwrap();
        let up = auc(&p, TestDirection::UpperTailed, &spec).unwrap();
        let truth = std_normal_cdf(2f64.sqrt());
        assert!((up - truth).abs() < 1e-9, "{up} vs {truth}");
        let lo = auc(&p, TestDirection::LowerTailed, &spec).unwrap();
        assert!((up + lo - 1.0).abs() < 1e-9);

        let m = |mu: f64| MixtureModel::normals(&[(1.0, mu, 1.0)]).unwrap();
        let closed = auc_mixture_normal(&m(2.0), &m(0.0), TestDirection::UpperTailed).unwrap();
        assert!((closed - 0.921_350_396_474_857_4).abs() < 1e-12);
    }

    #[test]
    fn normalized_affinity_rejects_heavy_beta() {
        let p = TestPair::new(
            Density::beta(0.4, 2.0).unwrap(),
            Density::beta(2.0, 2.0).unwrap(),
        );
        let err = affinity_normalized(&p, &p.default_spec().unwrap()).unwrap_err();
        assert_eq!(err, MeasureError::NotSquareIntegrable("beta"));
    }

    #[test]
    fn youden_grid_minimum() {
        let p = binormal(0.0, 1.0, 0.0, 1.0);
        assert!(matches!(
            youden(&p, TestDirection::UpperTailed, 10),
            Err(MeasureError::GridTooSmall { .. })
        ));
    }

    #[test]
    fn conditional_domain_is_enforced() {
        let c = ConditionalTestPair::new(
            |x: f64| Density::normal(x, 1.0),
            |x: f64| Density::normal(x - 3.0, 1.0 + x * x),
            (-1.0, 1.0),
        );
        assert!(matches!(c.at(2.0), Err(MeasureError::OutsideDomain { .. })));
        let k = affinity_conditional(&c, &[0.0], QuadratureSettings::default()).unwrap();
        assert!((k[0] - (-9.0f64 / 8.0).exp()).abs() < 1e-10);
    }
}
