use crate::error::BnpError;
use crate::prior::BaseMeasureHyper;

/// Standardized outcomes with their design rows, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataRows {
    z: Vec<f64>,
    design: Vec<f64>,
    p: usize,
}

impl DataRows {
    pub fn new(z: Vec<f64>, design: Vec<f64>, p: usize) -> Result<Self, BnpError> {
        if p == 0 || design.len() != z.len() * p {
            return Err(BnpError::DimensionMismatch {
                expected: z.len() * p.max(1),
                got: design.len(),
            });
        }
        if let Some(i) = z.iter().position(|v| !v.is_finite()) {
            return Err(affinity_core::TransformError::NonFinite(i).into());
        }
        Ok(Self { z, design, p })
    }

    /// Intercept-only design.
    pub fn intercept(z: Vec<f64>) -> Result<Self, BnpError> {
        let n = z.len();
        Self::new(z, vec![1.0; n], 1)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn z_mut(&mut self) -> &mut [f64] {
        &mut self.z
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.design[i * self.p..(i + 1) * self.p]
    }
}

/// A mixture atom: regression coefficients, variance and current size.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    beta: Vec<f64>,
    sigma2: f64,
    inv_var: f64,
    half_ln_var: f64,
    pub(crate) size: usize,
}

impl Cluster {
    pub fn new(beta: Vec<f64>, sigma2: f64) -> Result<Self, BnpError> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) || beta.iter().any(|b| !b.is_finite()) {
            return Err(BnpError::InvalidPrior(format!(
                "cluster parameters must be finite with positive variance (sigma2 = {sigma2})"
            )));
        }
        Ok(Self {
            inv_var: 1.0 / sigma2,
            half_ln_var: 0.5 * sigma2.ln(),
            beta,
            sigma2,
            size: 0,
        })
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub(crate) fn set(&mut self, beta: &[f64], sigma2: f64) {
        self.beta.copy_from_slice(beta);
        self.sigma2 = sigma2;
        self.inv_var = 1.0 / sigma2;
        self.half_ln_var = 0.5 * sigma2.ln();
    }

    /// Log normal density at `z` for design row `x`, without the `-ln(2pi)/2`.
    #[inline]
    pub(crate) fn log_kernel(&self, x: &[f64], z: f64) -> f64 {
        let mu: f64 = x.iter().zip(&self.beta).map(|(a, b)| a * b).sum();
        let r = z - mu;
        -self.half_ln_var - 0.5 * r * r * self.inv_var
    }
}

/// Full state of the marginal DPM sampler.
#[derive(Debug, Clone)]
pub struct DpmState {
    pub(crate) assignments: Vec<usize>,
    pub(crate) clusters: Vec<Cluster>,
    pub hyper: BaseMeasureHyper,
    pub alpha: f64,
}

impl DpmState {
    /// Builds a state from explicit labels and atoms; sizes are recomputed.
    pub fn from_parts(
        assignments: Vec<usize>,
        mut clusters: Vec<Cluster>,
        hyper: BaseMeasureHyper,
        alpha: f64,
    ) -> Result<Self, BnpError> {
        let p = hyper.dim();
        for c in clusters.iter_mut() {
            if c.beta.len() != p {
                return Err(BnpError::DimensionMismatch {
                    expected: p,
                    got: c.beta.len(),
                });
            }
            c.size = 0;
        }
        for &a in &assignments {
            let c = clusters.get_mut(a).ok_or_else(|| {
                BnpError::InvalidConfig(format!("assignment to missing cluster {a}"))
            })?;
            c.size += 1;
        }
        if clusters.iter().any(|c| c.size == 0) {
            return Err(BnpError::InvalidConfig("state has an empty cluster".into()));
        }
        if !(alpha > 0.0) {
            return Err(BnpError::InvalidPrior("alpha must be positive".into()));
        }
        Ok(Self {
            assignments,
            clusters,
            hyper,
            alpha,
        })
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn occupied(&self) -> usize {
        self.clusters.len()
    }

    pub fn n_obs(&self) -> usize {
        self.assignments.len()
    }

    /// Every observation points at an existing, correctly sized cluster.
    pub fn is_consistent(&self) -> bool {
        let mut counts = vec![0usize; self.clusters.len()];
        for &a in &self.assignments {
            match counts.get_mut(a) {
                Some(c) => *c += 1,
                None => return false,
            }
        }
        counts
            .iter()
            .zip(&self.clusters)
            .all(|(&n, c)| n > 0 && n == c.size && c.sigma2 > 0.0)
    }
}
