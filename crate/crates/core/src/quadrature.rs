//! Fixed-rule numerical integration on a segmented domain.
//!
//! A [`Layout`] is a set of quadrature nodes and weights covering `[lower, upper]`.
//! The domain is cut at breakpoints (support ends, truncation points, grid
//! nodes) and every segment receives a share of the panel budget proportional
//! to its length measured in units of the finest local length scale reported
//! by the densities involved. Narrow components therefore get resolved even
//! when the domain is wide, while the node count stays fixed and the result
//! deterministic.
//!
//! Segments that touch a point where an integrand may have an algebraic
//! singularity (the ends of a beta support) are integrated after the
//! sigmoidal substitution `y = u + (v - u) t^k / (t^k + (1 - t)^k)`, which
//! flattens the integrand at both ends.

use thiserror::Error;

use crate::scalar::Real;

/// Default node budget of [`QuadratureSettings`].
pub const DEFAULT_POINTS: usize = 4096;

/// Smallest accepted node budget.
pub const MIN_POINTS: usize = 16;

/// Order of the endpoint-flattening substitution.
const ENDPOINT_ORDER: i32 = 6;

/// Panel floor for segments integrated after the substitution.
const MIN_SUBSTITUTED_PANELS: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("invalid integration bounds [{lower}, {upper}]")]
    InvalidBounds { lower: f64, upper: f64 },
    #[error("n_points = {0} is too small (need at least {MIN_POINTS})")]
    TooFewPoints(usize),
    #[error("composite Simpson needs an even panel count, got {0}")]
    OddPanelCount(usize),
    #[error("integrand is not finite at y = {at}")]
    NonFinite { at: f64 },
    #[error("value slice has length {got}, layout has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cumulative integration requires a composite Simpson layout")]
    CumulativeUnsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureRule {
    #[default]
    CompositeSimpson,
    GaussLegendre,
}

/// Node budget and rule, independent of the integration bounds.
///
/// For composite Simpson `n_points` counts panels (it must be even); for
/// Gauss-Legendre it counts nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSettings {
    pub n_points: usize,
    pub rule: QuadratureRule,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_POINTS,
            rule: QuadratureRule::CompositeSimpson,
        }
    }
}

impl QuadratureSettings {
    pub fn new(n_points: usize, rule: QuadratureRule) -> Result<Self, QuadratureError> {
        let s = Self { n_points, rule };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.n_points < MIN_POINTS {
            return Err(QuadratureError::TooFewPoints(self.n_points));
        }
        if self.rule == QuadratureRule::CompositeSimpson && !self.n_points.is_multiple_of(2) {
            return Err(QuadratureError::OddPanelCount(self.n_points));
        }
        Ok(())
    }
}

/// Bounds plus settings: everything [`integrate`] needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub lower: T,
    pub upper: T,
    pub n_points: usize,
    pub rule: QuadratureRule,
}

impl<T: Real> QuadratureSpec<T> {
    /// Default settings (4096-panel composite Simpson) on `[lower, upper]`.
    pub fn new(lower: T, upper: T) -> Result<Self, QuadratureError> {
        Self::with_settings(lower, upper, QuadratureSettings::default())
    }

    pub fn with_settings(
        lower: T,
        upper: T,
        settings: QuadratureSettings,
    ) -> Result<Self, QuadratureError> {
        let spec = Self {
            lower,
            upper,
            n_points: settings.n_points,
            rule: settings.rule,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn settings(&self) -> QuadratureSettings {
        QuadratureSettings {
            n_points: self.n_points,
            rule: self.rule,
        }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(QuadratureError::InvalidBounds {
                lower: self.lower.as_f64(),
                upper: self.upper.as_f64(),
            });
        }
        self.settings().validate()
    }
}

/// Integrates `f` over `[spec.lower, spec.upper]` on a uniform layout.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    spec: &QuadratureSpec<T>,
) -> Result<T, QuadratureError> {
    Layout::uniform(spec)?.integrate(f)
}

/// Region `[lower, upper]` in which an integrand varies on length `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature<T> {
    pub lower: T,
    pub upper: T,
    pub scale: T,
}

/// Structural information about an integrand, collected from densities.
#[derive(Debug, Clone, Default)]
pub struct DomainHints<T> {
    pub features: Vec<Feature<T>>,
    /// Points where the integrand may jump or kink.
    pub breakpoints: Vec<T>,
    /// Points where the integrand may be unbounded or non-smooth to all orders.
    pub singular_points: Vec<T>,
}

impl<T: Real> DomainHints<T> {
    pub fn new() -> Self {
        Self {
            features: Vec::new(),
            breakpoints: Vec::new(),
            singular_points: Vec::new(),
        }
    }

    pub fn extend(&mut self, other: DomainHints<T>) {
        self.features.extend(other.features);
        self.breakpoints.extend(other.breakpoints);
        self.singular_points.extend(other.singular_points);
    }

    /// Hull of all feature intervals, if any.
    pub fn hull(&self) -> Option<(T, T)> {
        let mut it = self.features.iter();
        let first = it.next()?;
        Some(it.fold((first.lower, first.upper), |(lo, hi), f| {
            (lo.min(f.lower), hi.max(f.upper))
        }))
    }
}

#[derive(Debug, Clone, Copy)]
struct SegmentInfo<T> {
    start: usize,
    len: usize,
    /// Step in the integration variable (y, or t after substitution).
    step: T,
}

/// Quadrature nodes and weights over a segmented interval.
#[derive(Debug, Clone)]
pub struct Layout<T> {
    lower: T,
    upper: T,
    rule: QuadratureRule,
    nodes: Vec<T>,
    weights: Vec<T>,
    /// dy/dt at each node (one on untransformed segments).
    jacobian: Vec<T>,
    segments: Vec<SegmentInfo<T>>,
}

impl<T: Real> Layout<T> {
    /// Single segment, no substitution.
    pub fn uniform(spec: &QuadratureSpec<T>) -> Result<Self, QuadratureError> {
        spec.validate()?;
        let mut layout = Self::empty(spec.lower, spec.upper, spec.rule);
        layout.push_segment(spec.lower, spec.upper, spec.n_points, false);
        Ok(layout)
    }

    /// Segmented layout driven by density hints.
    pub fn from_hints(
        lower: T,
        upper: T,
        hints: &DomainHints<T>,
        settings: QuadratureSettings,
    ) -> Result<Self, QuadratureError> {
        QuadratureSpec::with_settings(lower, upper, settings)?;
        let width = upper - lower;
        let tol = width * T::lit(1e-12);

        let mut cuts: Vec<T> = vec![lower, upper];
        let inside = |p: T| p.is_finite() && p > lower && p < upper;
        cuts.extend(
            hints
                .features
                .iter()
                .flat_map(|f| [f.lower, f.upper])
                .chain(hints.breakpoints.iter().copied())
                .chain(hints.singular_points.iter().copied())
                .filter(|&p| inside(p)),
        );
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite cut points"));
        cuts.dedup_by(|b, a| (*b - *a) <= tol);
        if let Some(last) = cuts.last_mut() {
            *last = upper;
        }

        let fallback_density = hints
            .features
            .iter()
            .map(|f| T::one() / f.scale)
            .fold(T::infinity(), T::min);
        let fallback_density = if fallback_density.is_finite() {
            fallback_density
        } else {
            T::one() / width
        };

        let demands: Vec<T> = cuts
            .windows(2)
            .map(|w| {
                let mid = (w[0] + w[1]) * T::lit(0.5);
                let density = hints
                    .features
                    .iter()
                    .filter(|f| f.lower <= mid && mid <= f.upper)
                    .map(|f| T::one() / f.scale)
                    .fold(T::zero(), T::max);
                let density = if density > T::zero() {
                    density
                } else {
                    fallback_density
                };
                (w[1] - w[0]) * density
            })
            .collect();
        let is_singular = |p: T| hints.singular_points.iter().any(|&s| (s - p).abs() <= tol);
        let transformed: Vec<bool> = cuts
            .windows(2)
            .map(|w| is_singular(w[0]) || is_singular(w[1]))
            .collect();
        // the substitution stretches the middle of a segment by up to the
        // order of the map, so those segments need proportionally more panels
        let demands: Vec<T> = demands
            .into_iter()
            .zip(&transformed)
            .map(|(d, &t)| {
                if t {
                    d * T::lit(ENDPOINT_ORDER as f64)
                } else {
                    d
                }
            })
            .collect();
        let total: T = demands.iter().copied().sum();
        let budget = T::lit(settings.n_points as f64);

        let mut layout = Self::empty(lower, upper, settings.rule);
        for ((w, demand), &t) in cuts.windows(2).zip(demands).zip(&transformed) {
            let share = (budget * demand / total).as_f64();
            let min_panels = if t { MIN_SUBSTITUTED_PANELS } else { 2 };
            let panels = (2 * ((share / 2.0).round() as usize)).max(min_panels);
            layout.push_segment(w[0], w[1], panels, t);
        }
        Ok(layout)
    }

    fn empty(lower: T, upper: T, rule: QuadratureRule) -> Self {
        Self {
            lower,
            upper,
            rule,
            nodes: Vec::new(),
            weights: Vec::new(),
            jacobian: Vec::new(),
            segments: Vec::new(),
        }
    }

    fn push_segment(&mut self, u: T, v: T, panels: usize, transformed: bool) {
        let start = self.nodes.len();
        let width = v - u;
        // (parameter in [0, 1], base weight on [0, 1])
        let (params, base_weights, step): (Vec<T>, Vec<T>, T) = match self.rule {
            QuadratureRule::CompositeSimpson => {
                let h = T::one() / T::lit(panels as f64);
                let third = h / T::lit(3.0);
                let params = (0..=panels).map(|i| T::lit(i as f64) * h).collect();
                let weights = (0..=panels)
                    .map(|i| {
                        if i == 0 || i == panels {
                            third
                        } else if i % 2 == 1 {
                            third * T::lit(4.0)
                        } else {
                            third * T::lit(2.0)
                        }
                    })
                    .collect();
                (params, weights, h)
            }
            QuadratureRule::GaussLegendre => {
                let (x, w) = gauss_legendre_unit(panels + 1);
                (
                    x.into_iter().map(T::lit).collect(),
                    w.into_iter().map(T::lit).collect(),
                    T::zero(),
                )
            }
        };
        // End nodes sit just inside the segment so integrands that jump at a
        // breakpoint are sampled from the correct side.
        let nudge = (width * T::lit(1e-12))
            .max(u.abs().max(v.abs()) * T::epsilon() * T::lit(4.0))
            .min(width * T::lit(1e-3));
        let last = params.len() - 1;
        for (i, (t, bw)) in params.into_iter().zip(base_weights).enumerate() {
            let (s, ds) = if transformed {
                sigmoidal(t)
            } else {
                (t, T::one())
            };
            let jac = width * ds;
            let mut y = u + width * s;
            if self.rule == QuadratureRule::CompositeSimpson && !transformed {
                if i == 0 {
                    y = u + nudge;
                } else if i == last {
                    y = v - nudge;
                }
            }
            // substituted nodes may round onto a singular segment end
            if transformed {
                let tiny = |x: T| (x.abs() * T::epsilon()).max(T::min_positive_value());
                if y <= u {
                    y = u + tiny(u);
                } else if y >= v {
                    y = v - tiny(v);
                }
            }
            self.nodes.push(y);
            self.weights.push(bw * jac);
            self.jacobian.push(jac);
        }
        // Parameter step scaled so cumulative sums work in units of y for
        // untransformed segments.
        self.segments.push(SegmentInfo {
            start,
            len: self.nodes.len() - start,
            step,
        });
    }

    pub fn lower(&self) -> T {
        self.lower
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// Integrates `f`; nodes with zero weight are never evaluated.
    pub fn integrate<F: Fn(T) -> T>(&self, f: F) -> Result<T, QuadratureError> {
        let mut acc = T::zero();
        for (&y, &w) in self.nodes.iter().zip(&self.weights) {
            if w == T::zero() {
                continue;
            }
            let v = f(y);
            if !v.is_finite() {
                return Err(QuadratureError::NonFinite { at: y.as_f64() });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Weighted sum of integrand values already evaluated at [`Layout::nodes`].
    pub fn integrate_values(&self, values: &[T]) -> Result<T, QuadratureError> {
        self.check_len(values)?;
        let mut acc = T::zero();
        for ((&v, &w), &y) in values.iter().zip(&self.weights).zip(&self.nodes) {
            if w == T::zero() {
                continue;
            }
            if !v.is_finite() {
                return Err(QuadratureError::NonFinite { at: y.as_f64() });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Running integral from `lower` to every node (composite Simpson only).
    ///
    /// Even nodes use the Simpson panel sum; odd nodes add the half-panel
    /// formula `h/12 (5 f0 + 8 f1 - f2)`, so every entry is fourth-order
    /// accurate locally.
    pub fn cumulative(&self, values: &[T]) -> Result<Vec<T>, QuadratureError> {
        if self.rule != QuadratureRule::CompositeSimpson {
            return Err(QuadratureError::CumulativeUnsupported);
        }
        self.check_len(values)?;
        let mut out = vec![T::zero(); values.len()];
        let mut carried = T::zero();
        for seg in &self.segments {
            let g: Vec<T> = (seg.start..seg.start + seg.len)
                .map(|i| {
                    if self.jacobian[i] == T::zero() {
                        Ok(T::zero())
                    } else if values[i].is_finite() {
                        Ok(values[i] * self.jacobian[i])
                    } else {
                        Err(QuadratureError::NonFinite {
                            at: self.nodes[i].as_f64(),
                        })
                    }
                })
                .collect::<Result<_, _>>()?;
            let h = seg.step;
            let mut acc = carried;
            out[seg.start] = acc;
            let mut k = 0;
            while k + 2 < seg.len {
                let (f0, f1, f2) = (g[k], g[k + 1], g[k + 2]);
                out[seg.start + k + 1] =
                    acc + h / T::lit(12.0) * (T::lit(5.0) * f0 + T::lit(8.0) * f1 - f2);
                acc += h / T::lit(3.0) * (f0 + T::lit(4.0) * f1 + f2);
                out[seg.start + k + 2] = acc;
                k += 2;
            }
            carried = acc;
        }
        Ok(out)
    }

    fn check_len(&self, values: &[T]) -> Result<(), QuadratureError> {
        if values.len() != self.nodes.len() {
            return Err(QuadratureError::LengthMismatch {
                expected: self.nodes.len(),
                got: values.len(),
            });
        }
        Ok(())
    }
}

/// `t^k / (t^k + (1 - t)^k)` and its derivative.
fn sigmoidal<T: Real>(t: T) -> (T, T) {
    let k = ENDPOINT_ORDER;
    let s = T::one() - t;
    let a = t.powi(k);
    let b = s.powi(k);
    let denom = a + b;
    let value = a / denom;
    let kk = T::lit(k as f64);
    let deriv = kk * (t.powi(k - 1) * b + s.powi(k - 1) * a) / (denom * denom);
    (value, deriv)
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`, ascending.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                let jf = j as f64;
                p0 = ((2.0 * jf + 1.0) * z * p1 - jf * p2) / (jf + 1.0);
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // z is the i-th largest root
        x[n - 1 - i] = 0.5 * (1.0 + z);
        x[i] = 0.5 * (1.0 - z);
        w[n - 1 - i] = 0.5 * wi;
        w[i] = 0.5 * wi;
    }
    (x, w)
}
