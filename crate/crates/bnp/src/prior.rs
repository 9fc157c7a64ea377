//! Base measure `G0 = N(beta0, Sigma0) x IG(a, b)` and its hyperpriors
//! `beta0 ~ N(0, I)`, `Sigma0 ~ IW(df, I)`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::BnpError;

/// User-facing prior settings; resolved into a [`BaseMeasureHyper`] once the
/// design dimension is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSettings {
    /// Shape `a` of the inverse-gamma prior on cluster variances.
    pub ig_shape: f64,
    /// Second inverse-gamma parameter as written (50).
    pub ig_rate: f64,
    /// `false`: the IG density is `∝ s^-(a+1) exp(-(1/ig_rate)/s)` (mode 0.01 at the
    /// defaults). `true`: `∝ s^-(a+1) exp(-ig_rate/s)` (mode 25).
    pub ig_literal: bool,
    /// Inverse-Wishart degrees of freedom; `None` means `p + 2`.
    pub iwish_df: Option<f64>,
    /// DP precision.
    pub alpha: f64,
    /// Number of fresh `G0` atoms standing in for the `alpha / (n + alpha)` part of
    /// each predictive draw.
    pub predictive_draws: usize,
}

impl Default for PriorSettings {
    fn default() -> Self {
        Self {
            ig_shape: 1.0,
            ig_rate: 50.0,
            ig_literal: false,
            iwish_df: None,
            alpha: 1.0,
            predictive_draws: 50,
        }
    }
}

impl PriorSettings {
    /// Reads the variance prior and the Wishart degrees of freedom literally:
    /// `IG(1, 50)` in the rate sense and `df = 1`.
    pub fn literal() -> Self {
        Self {
            ig_literal: true,
            iwish_df: Some(1.0),
            ..Self::default()
        }
    }

    /// The `b` in `exp(-b / sigma2)`.
    pub fn ig_scale(&self) -> f64 {
        if self.ig_literal {
            self.ig_rate
        } else {
            1.0 / self.ig_rate
        }
    }

    pub fn iwish_df_for(&self, p: usize) -> f64 {
        self.iwish_df.unwrap_or(p as f64 + 2.0)
    }

    pub fn validate(&self) -> Result<(), BnpError> {
        let bad = |m: &str| Err(BnpError::InvalidPrior(m.to_string()));
        if !(self.ig_shape > 0.0 && self.ig_shape.is_finite()) {
            return bad("ig_shape must be positive");
        }
        if !(self.ig_rate > 0.0 && self.ig_rate.is_finite()) {
            return bad("ig_rate must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if let Some(df) = self.iwish_df {
            if !(df > 0.0 && df.is_finite()) {
                return bad("iwish_df must be positive");
            }
        }
        if self.predictive_draws == 0 {
            return bad("predictive_draws must be positive");
        }
        Ok(())
    }
}

/// Current base-measure hyperparameters plus the fixed hyperprior constants.
#[derive(Debug, Clone)]
pub struct BaseMeasureHyper {
    beta0: DVector<f64>,
    sigma0: DMatrix<f64>,
    sigma0_chol: DMatrix<f64>,
    sigma0_inv: DMatrix<f64>,
    pub ig_shape: f64,
    pub ig_scale: f64,
    pub iwish_df: f64,
}

impl BaseMeasureHyper {
    /// `beta0 = 0`, `Sigma0 = I`.
    pub fn initial(p: usize, settings: &PriorSettings) -> Result<Self, BnpError> {
        settings.validate()?;
        if p == 0 {
            return Err(BnpError::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let mut h = Self {
            beta0: DVector::zeros(p),
            sigma0: DMatrix::identity(p, p),
            sigma0_chol: DMatrix::identity(p, p),
            sigma0_inv: DMatrix::identity(p, p),
            ig_shape: settings.ig_shape,
            ig_scale: settings.ig_scale(),
            iwish_df: settings.iwish_df_for(p),
        };
        h.set_sigma0(DMatrix::identity(p, p))?;
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.beta0.len()
    }

    pub fn beta0(&self) -> &DVector<f64> {
        &self.beta0
    }

    pub fn sigma0(&self) -> &DMatrix<f64> {
        &self.sigma0
    }

    pub fn sigma0_inv(&self) -> &DMatrix<f64> {
        &self.sigma0_inv
    }

    pub fn set_beta0(&mut self, beta0: DVector<f64>) -> Result<(), BnpError> {
        if beta0.len() != self.dim() {
            return Err(BnpError::DimensionMismatch {
                expected: self.dim(),
                got: beta0.len(),
            });
        }
        self.beta0 = beta0;
        Ok(())
    }

    pub fn set_sigma0(&mut self, sigma0: DMatrix<f64>) -> Result<(), BnpError> {
        let chol = cholesky_jitter(&sigma0, "Sigma0")?;
        self.sigma0_inv = chol.inverse();
        self.sigma0_chol = chol.l();
        self.sigma0 = sigma0;
        Ok(())
    }

    /// One atom `(beta, sigma2)` from `G0`; `beta` is written into `beta_out`.
    pub fn draw_atom<R: Rng + ?Sized>(&self, rng: &mut R, beta_out: &mut [f64]) -> f64 {
        let p = self.dim();
        let mut eps = [0.0f64; 16];
        let mut eps_vec;
        let eps: &mut [f64] = if p <= 16 {
            &mut eps[..p]
        } else {
            eps_vec = vec![0.0; p];
            &mut eps_vec
        };
        for e in eps.iter_mut() {
            *e = rng.sample(StandardNormal);
        }
        for i in 0..p {
            let mut v = self.beta0[i];
            for j in 0..=i {
                v += self.sigma0_chol[(i, j)] * eps[j];
            }
            beta_out[i] = v;
        }
        draw_inverse_gamma(rng, self.ig_shape, self.ig_scale)
    }
}

/// Draw from `IG(shape, scale)` as `scale / Gamma(shape, 1)`.
pub fn draw_inverse_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> f64 {
    let g: f64 = Gamma::new(shape, 1.0)
        .expect("inverse-gamma shape is positive")
        .sample(rng);
    // Gamma(shape < 1) can underflow to 0; keep the variance finite.
    scale / g.max(f64::MIN_POSITIVE)
}

/// Cholesky factorization, retried with growing diagonal jitter.
pub fn cholesky_jitter(
    m: &DMatrix<f64>,
    what: &'static str,
) -> Result<Cholesky<f64, Dyn>, BnpError> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(BnpError::Cholesky(what));
    }
    if let Some(c) = Cholesky::new(m.clone()) {
        return Ok(c);
    }
    let p = m.nrows();
    let base = (m.trace().abs() / p as f64).max(1e-300);
    for k in 0..6 {
        let jitter = base * 1e-10 * 10f64.powi(k);
        let mut mj = m.clone();
        for i in 0..p {
            mj[(i, i)] += jitter;
        }
        if let Some(c) = Cholesky::new(mj) {
            log::warn!("{what}: Cholesky succeeded after adding jitter {jitter:e}");
            return Ok(c);
        }
    }
    Err(BnpError::Cholesky(what))
}

/// Draw from `N(P^-1 b, P^-1)` given the precision `P` and `b`.
pub fn draw_mvn_from_precision<R: Rng + ?Sized>(
    rng: &mut R,
    precision: &DMatrix<f64>,
    b: &DVector<f64>,
    what: &'static str,
) -> Result<DVector<f64>, BnpError> {
    let chol = cholesky_jitter(precision, what)?;
    let mean = chol.solve(b);
    let p = b.len();
    let eps = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let lt = chol.l().transpose();
    let dev = lt
        .solve_upper_triangular(&eps)
        .ok_or(BnpError::Cholesky(what))?;
    Ok(mean + dev)
}

/// Draw from the inverse-Wishart `IW(df, scale)` (mean `scale / (df - p - 1)`)
/// through the Bartlett decomposition of the matching Wishart.
pub fn draw_inverse_wishart<R: Rng + ?Sized>(
    rng: &mut R,
    df: f64,
    scale: &DMatrix<f64>,
) -> Result<DMatrix<f64>, BnpError> {
    let p = scale.nrows();
    let min = p as f64 - 1.0;
    if !(df > min) {
        return Err(BnpError::ImproperWishart { df, min });
    }
    let c = cholesky_jitter(scale, "inverse-Wishart scale")?.l();
    let mut a = DMatrix::<f64>::zeros(p, p);
    for i in 0..p {
        let chi: f64 = ChiSquared::new(df - i as f64)
            .expect("positive degrees of freedom")
            .sample(rng);
        a[(i, i)] = chi.max(f64::MIN_POSITIVE).sqrt();
        for j in 0..i {
            a[(i, j)] = rng.sample(StandardNormal);
        }
    }
    // Sigma = C A^-T A^-1 C^T.
    let a_inv = a
        .solve_lower_triangular(&DMatrix::identity(p, p))
        .ok_or(BnpError::Cholesky("Bartlett factor"))?;
    let m = &c * a_inv.transpose();
    let s = &m * m.transpose();
    Ok((&s + s.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use affinity_core::RngStream;

    #[test]
    fn ig_readings() {
        let s = PriorSettings::default();
        assert_eq!(s.ig_scale(), 0.02);
        assert_eq!(PriorSettings::literal().ig_scale(), 50.0);
        assert_eq!(s.iwish_df_for(4), 6.0);
        assert_eq!(PriorSettings::literal().iwish_df_for(4), 1.0);
    }

    #[test]
    fn inverse_wishart_mean() {
        let mut rng = RngStream::new(3).rng();
        let scale = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let df = 8.0;
        let n = 40_000;
        let mut acc = DMatrix::<f64>::zeros(2, 2);
        for _ in 0..n {
            acc += draw_inverse_wishart(&mut rng, df, &scale).unwrap();
        }
        acc /= n as f64;
        let expect = &scale / (df - 3.0);
        for (a, e) in acc.iter().zip(expect.iter()) {
            assert!((a - e).abs() < 0.02 * e.abs().max(0.2), "{a} vs {e}");
        }
    }

    #[test]
    fn mvn_from_precision_moments() {
        let mut rng = RngStream::new(5).rng();
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.6, 0.6, 2.0]);
        let prec = cov.clone().try_inverse().unwrap();
        let mean = DVector::from_vec(vec![1.0, -2.0]);
        let b = &prec * &mean;
        let n = 50_000;
        let draws: Vec<DVector<f64>> = (0..n)
            .map(|_| draw_mvn_from_precision(&mut rng, &prec, &b, "test").unwrap())
            .collect();
        let m = draws.iter().fold(DVector::zeros(2), |a, d| a + d) / n as f64;
        let c01 = draws
            .iter()
            .map(|d| (d[0] - m[0]) * (d[1] - m[1]))
            .sum::<f64>()
            / n as f64;
        assert!((m - mean).amax() < 0.03);
        assert!((c01 - 0.6).abs() < 0.03);
    }
}
