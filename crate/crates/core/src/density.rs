//! Univariate densities: parametric families, finite mixtures and grid densities.

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use thiserror::Error;

use crate::quadrature::{DomainHints, Feature};
use crate::rng::RngStream;
use crate::scalar::Real;
use crate::special::{beta_reg, ln_beta, std_normal_cdf, std_normal_pdf, std_normal_quantile};

/// Half-width, in standard deviations, of the region where a normal
/// component is considered to carry mass.
pub const NORMAL_REACH: f64 = 10.0;

/// Multiple of the mean used as the effective upper end of an exponential.
const EXPONENTIAL_REACH: f64 = 40.0;

/// Squared z-score beyond which a normal kernel is treated as zero
/// (the kernel is below `e^-100` of its mode there).
const NORMAL_KERNEL_CUTOFF: f64 = 200.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("invalid {family} parameter: {detail}")]
    InvalidParameter {
        family: &'static str,
        detail: String,
    },
    #[error("mixture must have at least one component")]
    EmptyMixture,
    #[error("mixture has {weights} weights but {components} components")]
    LengthMismatch { weights: usize, components: usize },
    #[error("mixture weights must lie in [0, 1] and sum to one (sum = {sum})")]
    InvalidWeights { sum: f64 },
    #[error("grid density: {0}")]
    InvalidGrid(String),
    #[error("sampling is not supported for {0} densities")]
    SamplingUnsupported(&'static str),
    #[error("sample size must be at least one")]
    EmptySample,
}

fn invalid(family: &'static str, detail: impl Into<String>) -> DensityError {
    DensityError::InvalidParameter {
        family,
        detail: detail.into(),
    }
}

/// Normal distribution with mean `mu` and standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalParams<T> {
    mu: T,
    sigma: T,
}

impl<T: Real> NormalParams<T> {
    pub fn new(mu: T, sigma: T) -> Result<Self, DensityError> {
        if !mu.is_finite() {
            return Err(invalid("normal", format!("mu = {mu} is not finite")));
        }
        if !(sigma.is_finite() && sigma > T::zero()) {
            return Err(invalid(
                "normal",
                format!("sigma = {sigma} must be positive"),
            ));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    #[inline]
    pub fn pdf(&self, y: T) -> T {
        let z = (y - self.mu) / self.sigma;
        if z * z > T::lit(NORMAL_KERNEL_CUTOFF) {
            return T::zero();
        }
        std_normal_pdf(z) / self.sigma
    }

    pub fn cdf(&self, y: T) -> T {
        std_normal_cdf((y - self.mu) / self.sigma)
    }

    fn hints(&self, out: &mut DomainHints<T>) {
        let reach = T::lit(NORMAL_REACH) * self.sigma;
        out.features.push(Feature {
            lower: self.mu - reach,
            upper: self.mu + reach,
            scale: self.sigma,
        });
    }

    fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let z: f64 = StandardNormal.sample(rng);
        self.mu + self.sigma * T::lit(z)
    }
}

/// Normal distribution restricted to `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncNormalParams<T> {
    a: T,
    b: T,
    mu: T,
    sigma: T,
    mass: T,
}

impl<T: Real> TruncNormalParams<T> {
    pub fn new(a: T, b: T, mu: T, sigma: T) -> Result<Self, DensityError> {
        let base = NormalParams::new(mu, sigma)
            .map_err(|_| invalid("truncated normal", "mu finite and sigma > 0 required"))?;
        if !(a < b) || a.is_nan() || b.is_nan() {
            return Err(invalid(
                "truncated normal",
                format!("bounds must satisfy a < b (a = {a}, b = {b})"),
            ));
        }
        let mass = Self::interval_mass(&base, a, b);
        if !(mass > T::zero()) {
            return Err(invalid(
                "truncated normal",
                "truncation interval carries no numerically representable mass",
            ));
        }
        Ok(Self {
            a,
            b,
            mu,
            sigma,
            mass,
        })
    }

    fn interval_mass(base: &NormalParams<T>, a: T, b: T) -> T {
        let za = (a - base.mu) / base.sigma;
        let zb = (b - base.mu) / base.sigma;
        if za > T::zero() {
            std_normal_cdf(-za) - std_normal_cdf(-zb)
        } else {
            std_normal_cdf(zb) - std_normal_cdf(za)
        }
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Mass of the untruncated normal inside `[a, b]`.
    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn pdf(&self, y: T) -> T {
        if y < self.a || y > self.b {
            return T::zero();
        }
        std_normal_pdf((y - self.mu) / self.sigma) / (self.sigma * self.mass)
    }

    pub fn cdf(&self, y: T) -> T {
        if y <= self.a {
            return T::zero();
        }
        if y >= self.b {
            return T::one();
        }
        let za = (self.a - self.mu) / self.sigma;
        let z = (y - self.mu) / self.sigma;
        let num = if za > T::zero() {
            std_normal_cdf(-za) - std_normal_cdf(-z)
        } else {
            std_normal_cdf(z) - std_normal_cdf(za)
        };
        (num / self.mass).max(T::zero()).min(T::one())
    }

    fn hints(&self, out: &mut DomainHints<T>) {
        let reach = T::lit(NORMAL_REACH) * self.sigma;
        let mut lo = self.a.max(self.mu - reach);
        let mut hi = self.b.min(self.mu + reach);
        let mut scale = self.sigma;
        if !(lo < hi) {
            // window lies in a far tail: exponential-like decay
            lo = self.a;
            hi = self.b;
            let dist = (self.a - self.mu).abs().min((self.b - self.mu).abs());
            scale = scale.min(self.sigma * self.sigma / dist);
        }
        scale = scale.min((hi - lo) / T::lit(8.0));
        out.features.push(Feature {
            lower: lo,
            upper: hi,
            scale,
        });
        out.breakpoints.push(self.a);
        out.breakpoints.push(self.b);
    }

    fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let (mu, sigma) = (self.mu.as_f64(), self.sigma.as_f64());
        let za = (self.a.as_f64() - mu) / sigma;
        let zb = (self.b.as_f64() - mu) / sigma;
        let u: f64 = rng.random();
        // Work in whichever tail keeps the CDF values small.
        let z = if za > 0.0 {
            let (pa, pb) = (std_normal_cdf(-zb), std_normal_cdf(-za));
            -std_normal_quantile(pa + u * (pb - pa))
        } else {
            let (pa, pb) = (std_normal_cdf(za), std_normal_cdf(zb));
            std_normal_quantile(pa + u * (pb - pa))
        };
        let y = T::lit(mu + sigma * z.clamp(za, zb));
        y.max(self.a).min(self.b)
    }
}

/// Beta distribution on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams<T> {
    a: T,
    b: T,
    ln_norm: f64,
}

impl<T: Real> BetaParams<T> {
    pub fn new(a: T, b: T) -> Result<Self, DensityError> {
        if !(a.is_finite() && b.is_finite() && a > T::zero() && b > T::zero()) {
            return Err(invalid(
                "beta",
                format!("shapes must be positive (a = {a}, b = {b})"),
            ));
        }
        Ok(Self {
            a,
            b,
            ln_norm: ln_beta(a.as_f64(), b.as_f64()),
        })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn pdf(&self, y: T) -> T {
        if y < T::zero() || y > T::one() {
            return T::zero();
        }
        let (a, b) = (self.a.as_f64(), self.b.as_f64());
        let y = y.as_f64();
        let edge = |shape: f64, other: f64| -> f64 {
            if shape < 1.0 {
                f64::INFINITY
            } else if shape == 1.0 {
                // density at the edge is 1/B(1, other) = other
                (-(ln_beta(1.0, other))).exp()
            } else {
                0.0
            }
        };
        let v = if y == 0.0 {
            edge(a, b)
        } else if y == 1.0 {
            edge(b, a)
        } else {
            ((a - 1.0) * y.ln() + (b - 1.0) * (-y).ln_1p() - self.ln_norm).exp()
        };
        T::lit(v)
    }

    pub fn cdf(&self, y: T) -> T {
        T::lit(beta_reg(self.a.as_f64(), self.b.as_f64(), y.as_f64()))
    }

    pub fn mean(&self) -> T {
        self.a / (self.a + self.b)
    }

    pub fn sd(&self) -> T {
        let s = self.a + self.b;
        (self.a * self.b / (s * s * (s + T::one()))).sqrt()
    }

    fn hints(&self, out: &mut DomainHints<T>) {
        out.features.push(Feature {
            lower: T::zero(),
            upper: T::one(),
            scale: (self.sd() * T::lit(0.5)).min(T::lit(0.25)),
        });
        out.breakpoints.extend([T::zero(), T::one()]);
        out.singular_points.extend([T::zero(), T::one()]);
    }

    fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let dist =
            rand_distr::Beta::new(self.a.as_f64(), self.b.as_f64()).expect("validated beta shapes");
        T::lit(dist.sample(rng))
    }
}

/// Exponential distribution with rate `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialParams<T> {
    lambda: T,
}

impl<T: Real> ExponentialParams<T> {
    pub fn new(lambda: T) -> Result<Self, DensityError> {
        if !(lambda.is_finite() && lambda > T::zero()) {
            return Err(invalid(
                "exponential",
                format!("rate {lambda} must be positive"),
            ));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn pdf(&self, y: T) -> T {
        if y < T::zero() {
            T::zero()
        } else {
            self.lambda * (-self.lambda * y).exp()
        }
    }

    pub fn cdf(&self, y: T) -> T {
        if y <= T::zero() {
            T::zero()
        } else {
            -(-self.lambda * y).exp_m1()
        }
    }

    fn hints(&self, out: &mut DomainHints<T>) {
        let mean = T::one() / self.lambda;
        out.features.push(Feature {
            lower: T::zero(),
            upper: mean * T::lit(EXPONENTIAL_REACH),
            scale: mean,
        });
        out.breakpoints.push(T::zero());
    }

    fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let dist = Exp::new(self.lambda.as_f64()).expect("validated rate");
        T::lit(dist.sample(rng))
    }
}

/// Log-normal distribution: `ln Y ~ N(mu, sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalParams<T> {
    log: NormalParams<T>,
}

impl<T: Real> LogNormalParams<T> {
    pub fn new(mu: T, sigma: T) -> Result<Self, DensityError> {
        NormalParams::new(mu, sigma)
            .map(|log| Self { log })
            .map_err(|_| invalid("log-normal", "mu finite and sigma > 0 required"))
    }

    pub fn mu(&self) -> T {
        self.log.mu
    }

    pub fn sigma(&self) -> T {
        self.log.sigma
    }

    pub fn pdf(&self, y: T) -> T {
        if y <= T::zero() {
            T::zero()
        } else {
            self.log.pdf(y.ln()) / y
        }
    }

    pub fn cdf(&self, y: T) -> T {
        if y <= T::zero() {
            T::zero()
        } else {
            self.log.cdf(y.ln())
        }
    }

    fn hints(&self, out: &mut DomainHints<T>) {
        let (mu, sigma) = (self.log.mu, self.log.sigma);
        // geometric bands at most a quarter unit wide on the log scale
        let reach = T::lit(NORMAL_REACH) * sigma;
        let step = sigma.min(T::lit(0.25));
        let bands = (T::lit(2.0) * reach / step)
            .ceil()
            .to_usize()
            .unwrap_or(1)
            .max(1);
        for j in 0..bands {
            let off = -reach + step * T::lit(j as f64);
            let next = (off + step).min(reach);
            let lo = (mu + off).exp();
            out.features.push(Feature {
                lower: lo,
                upper: (mu + next).exp(),
                scale: lo * sigma,
            });
        }
    }

    fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        self.log.sample_one(rng).exp()
    }
}

/// Finite mixture `sum_h w_h f_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel<T> {
    weights: Vec<T>,
    components: Vec<Density<T>>,
}

impl<T: Real> MixtureModel<T> {
    pub fn new(weights: Vec<T>, components: Vec<Density<T>>) -> Result<Self, DensityError> {
        if components.is_empty() {
            return Err(DensityError::EmptyMixture);
        }
        if weights.len() != components.len() {
            return Err(DensityError::LengthMismatch {
                weights: weights.len(),
                components: components.len(),
            });
        }
        let sum: T = weights.iter().copied().sum();
        let in_range = weights
            .iter()
            .all(|&w| w.is_finite() && w >= T::zero() && w <= T::one());
        if !in_range || (sum - T::one()).abs() > T::unit_sum_tolerance() {
            return Err(DensityError::InvalidWeights { sum: sum.as_f64() });
        }
        Ok(Self {
            weights,
            components,
        })
    }

    /// Mixture of normals from `(weight, mu, sigma)` triples.
    pub fn normals(parts: &[(T, T, T)]) -> Result<Self, DensityError> {
        let comps = parts
            .iter()
            .map(|&(_, mu, sigma)| NormalParams::new(mu, sigma).map(Density::Normal))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(parts.iter().map(|p| p.0).collect(), comps)
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn components(&self) -> &[Density<T>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `(weight, params)` pairs when every component is normal.
    pub fn normal_components(&self) -> Option<Vec<(T, NormalParams<T>)>> {
        self.weights
            .iter()
            .zip(&self.components)
            .map(|(&w, c)| match c {
                Density::Normal(p) => Some((w, *p)),
                _ => None,
            })
            .collect()
    }

    pub fn pdf(&self, y: T) -> T {
        self.weights
            .iter()
            .zip(&self.components)
            .filter(|(w, _)| **w > T::zero())
            .map(|(&w, c)| w * c.pdf(y))
            .sum()
    }

    pub fn cdf(&self, y: T) -> T {
        self.weights
            .iter()
            .zip(&self.components)
            .map(|(&w, c)| w * c.cdf(y))
            .sum()
    }

    fn hints(&self, out: &mut DomainHints<T>) {
        for (w, c) in self.weights.iter().zip(&self.components) {
            if *w > T::zero() {
                c.collect_hints(out);
            }
        }
    }

    fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<T, DensityError> {
        let u = T::lit(rng.random::<f64>());
        let mut acc = T::zero();
        let mut chosen = self.components.len() - 1;
        for (i, &w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                chosen = i;
                break;
            }
        }
        self.components[chosen].sample_one(rng)
    }
}

/// Piecewise-linear density through `(grid[i], values[i])`, zero outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity<T> {
    grid: Vec<T>,
    values: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Real> GridDensity<T> {
    /// Validates the grid and requires the trapezoid integral to be one within 1e-6.
    pub fn new(grid: Vec<T>, values: Vec<T>) -> Result<Self, DensityError> {
        let g = Self::build(grid, values)?;
        let total = *g.cumulative.last().expect("nonempty");
        if (total - T::one()).abs() > T::lit(1e-6) {
            return Err(DensityError::InvalidGrid(format!(
                "values integrate to {total}, expected 1"
            )));
        }
        Ok(g)
    }

    /// Rescales the values so the density integrates to one.
    pub fn normalized(grid: Vec<T>, values: Vec<T>) -> Result<Self, DensityError> {
        let g = Self::build(grid, values)?;
        let total = *g.cumulative.last().expect("nonempty");
        if !(total > T::zero()) {
            return Err(DensityError::InvalidGrid("values integrate to zero".into()));
        }
        let values = g.values.iter().map(|&v| v / total).collect();
        Self::build(g.grid, values)
    }

    fn build(grid: Vec<T>, values: Vec<T>) -> Result<Self, DensityError> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(DensityError::InvalidGrid(format!(
                "need matching grid/value lengths of at least 2 (got {} and {})",
                grid.len(),
                values.len()
            )));
        }
        if grid.iter().any(|g| !g.is_finite()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(DensityError::InvalidGrid(
                "grid must be finite and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(DensityError::InvalidGrid(
                "values must be finite and nonnegative".into(),
            ));
        }
        let mut cumulative = Vec::with_capacity(grid.len());
        let mut acc = T::zero();
        cumulative.push(acc);
        for i in 1..grid.len() {
            acc += (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]) * T::lit(0.5);
            cumulative.push(acc);
        }
        Ok(Self {
            grid,
            values,
            cumulative,
        })
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    fn cell(&self, y: T) -> Option<usize> {
        let n = self.grid.len();
        if y < self.grid[0] || y > self.grid[n - 1] {
            return None;
        }
        let idx = self.grid.partition_point(|&g| g <= y);
        Some(idx.clamp(1, n - 1) - 1)
    }

    pub fn pdf(&self, y: T) -> T {
        match self.cell(y) {
            None => T::zero(),
            Some(i) => {
                let (g0, g1) = (self.grid[i], self.grid[i + 1]);
                let t = (y - g0) / (g1 - g0);
                self.values[i] + t * (self.values[i + 1] - self.values[i])
            }
        }
    }

    pub fn cdf(&self, y: T) -> T {
        let n = self.grid.len();
        let total = self.cumulative[n - 1];
        if y <= self.grid[0] {
            return T::zero();
        }
        if y >= self.grid[n - 1] {
            return T::one();
        }
        let i = self.cell(y).expect("inside grid");
        let (g0, g1) = (self.grid[i], self.grid[i + 1]);
        let d = y - g0;
        let slope = (self.values[i + 1] - self.values[i]) / (g1 - g0);
        let partial = d * (self.values[i] + T::lit(0.5) * slope * d);
        ((self.cumulative[i] + partial) / total).min(T::one())
    }

    fn hints(&self, out: &mut DomainHints<T>) {
        let n = self.grid.len();
        let (lo, hi) = (self.grid[0], self.grid[n - 1]);
        out.features.push(Feature {
            lower: lo,
            upper: hi,
            scale: (hi - lo) / T::lit((n - 1) as f64),
        });
        if n <= 2048 {
            out.breakpoints.extend(self.grid.iter().copied());
        } else {
            out.breakpoints.extend([lo, hi]);
        }
    }
}

/// Any density the accuracy measures can consume.
#[derive(Debug, Clone, PartialEq)]
pub enum Density<T> {
    Normal(NormalParams<T>),
    TruncNormal(TruncNormalParams<T>),
    Beta(BetaParams<T>),
    Exponential(ExponentialParams<T>),
    LogNormal(LogNormalParams<T>),
    Mixture(MixtureModel<T>),
    Grid(GridDensity<T>),
}

impl<T: Real> Density<T> {
    pub fn normal(mu: T, sigma: T) -> Result<Self, DensityError> {
        NormalParams::new(mu, sigma).map(Self::Normal)
    }

    pub fn trunc_normal(a: T, b: T, mu: T, sigma: T) -> Result<Self, DensityError> {
        TruncNormalParams::new(a, b, mu, sigma).map(Self::TruncNormal)
    }

    pub fn beta(a: T, b: T) -> Result<Self, DensityError> {
        BetaParams::new(a, b).map(Self::Beta)
    }

    pub fn exponential(lambda: T) -> Result<Self, DensityError> {
        ExponentialParams::new(lambda).map(Self::Exponential)
    }

    pub fn log_normal(mu: T, sigma: T) -> Result<Self, DensityError> {
        LogNormalParams::new(mu, sigma).map(Self::LogNormal)
    }

    pub fn mixture(weights: Vec<T>, components: Vec<Density<T>>) -> Result<Self, DensityError> {
        MixtureModel::new(weights, components).map(Self::Mixture)
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Normal(_) => "normal",
            Self::TruncNormal(_) => "truncated normal",
            Self::Beta(_) => "beta",
            Self::Exponential(_) => "exponential",
            Self::LogNormal(_) => "log-normal",
            Self::Mixture(_) => "mixture",
            Self::Grid(_) => "grid",
        }
    }

    /// Density at `y`; zero outside the support.
    pub fn pdf(&self, y: T) -> T {
        match self {
            Self::Normal(p) => p.pdf(y),
            Self::TruncNormal(p) => p.pdf(y),
            Self::Beta(p) => p.pdf(y),
            Self::Exponential(p) => p.pdf(y),
            Self::LogNormal(p) => p.pdf(y),
            Self::Mixture(m) => m.pdf(y),
            Self::Grid(g) => g.pdf(y),
        }
    }

    pub fn cdf(&self, y: T) -> T {
        match self {
            Self::Normal(p) => p.cdf(y),
            Self::TruncNormal(p) => p.cdf(y),
            Self::Beta(p) => p.cdf(y),
            Self::Exponential(p) => p.cdf(y),
            Self::LogNormal(p) => p.cdf(y),
            Self::Mixture(m) => m.cdf(y),
            Self::Grid(g) => g.cdf(y),
        }
    }

    /// Closed support `[lower, upper]`, possibly infinite.
    pub fn support(&self) -> (T, T) {
        match self {
            Self::Normal(_) => (T::neg_infinity(), T::infinity()),
            Self::TruncNormal(p) => (p.a, p.b),
            Self::Beta(_) => (T::zero(), T::one()),
            Self::Exponential(_) | Self::LogNormal(_) => (T::zero(), T::infinity()),
            Self::Mixture(m) => m
                .components
                .iter()
                .map(Density::support)
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), (a, b)| {
                    (lo.min(a), hi.max(b))
                }),
            Self::Grid(g) => (g.grid[0], g.grid[g.grid.len() - 1]),
        }
    }

    /// Structural hints for building quadrature layouts.
    pub fn hints(&self) -> DomainHints<T> {
        let mut out = DomainHints::new();
        self.collect_hints(&mut out);
        out
    }

    fn collect_hints(&self, out: &mut DomainHints<T>) {
        match self {
            Self::Normal(p) => p.hints(out),
            Self::TruncNormal(p) => p.hints(out),
            Self::Beta(p) => p.hints(out),
            Self::Exponential(p) => p.hints(out),
            Self::LogNormal(p) => p.hints(out),
            Self::Mixture(m) => m.hints(out),
            Self::Grid(g) => g.hints(out),
        }
    }

    /// Finite interval that holds all but a negligible fraction of the mass:
    /// exact support ends for bounded families, ten standard deviations past
    /// the extreme normal components otherwise.
    pub fn integration_bounds(&self) -> (T, T) {
        self.hints()
            .hull()
            .expect("every density reports a feature")
    }

    /// False when the density is known not to be square integrable.
    pub fn is_square_integrable(&self) -> bool {
        match self {
            Self::Beta(p) => p.a > T::lit(0.5) && p.b > T::lit(0.5),
            Self::Mixture(m) => m
                .weights
                .iter()
                .zip(&m.components)
                .all(|(w, c)| *w == T::zero() || c.is_square_integrable()),
            _ => true,
        }
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<T, DensityError> {
        Ok(match self {
            Self::Normal(p) => p.sample_one(rng),
            Self::TruncNormal(p) => p.sample_one(rng),
            Self::Beta(p) => p.sample_one(rng),
            Self::Exponential(p) => p.sample_one(rng),
            Self::LogNormal(p) => p.sample_one(rng),
            Self::Mixture(m) => m.sample_one(rng)?,
            Self::Grid(_) => return Err(DensityError::SamplingUnsupported("grid")),
        })
    }

    /// `n` independent draws using the supplied generator.
    pub fn sample_with<R: Rng + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
    ) -> Result<Vec<T>, DensityError> {
        if n == 0 {
            return Err(DensityError::EmptySample);
        }
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// `n` independent draws from the stream seeded by `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<T>, DensityError> {
        let mut rng = RngStream::new(seed).rng();
        self.sample_with(n, &mut rng)
    }
}
