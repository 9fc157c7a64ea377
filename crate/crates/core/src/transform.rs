//! Covariate rescaling and outcome standardization.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("need at least {needed} values, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("input contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("covariate is constant; cannot rescale to [-1, 1]")]
    ConstantCovariate,
    #[error("outcomes have zero variance; cannot standardize")]
    ZeroVariance,
}

fn check_finite<T: Real>(xs: &[T], needed: usize) -> Result<(), TransformError> {
    if xs.len() < needed {
        return Err(TransformError::TooFew {
            needed,
            got: xs.len(),
        });
    }
    match xs.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(TransformError::NonFinite(i)),
        None => Ok(()),
    }
}

/// Affine map sending `[min, max]` onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap<T> {
    pub min: T,
    pub max: T,
}

impl<T: Real> AffineMap<T> {
    pub fn new(min: T, max: T) -> Result<Self, TransformError> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(TransformError::NonFinite(0));
        }
        if !(min < max) {
            return Err(TransformError::ConstantCovariate);
        }
        Ok(Self { min, max })
    }

    /// Original units to `[-1, 1]`; the endpoints map exactly.
    pub fn apply(&self, x: T) -> T {
        if x == self.min {
            -T::one()
        } else if x == self.max {
            T::one()
        } else {
            (T::lit(2.0) * x - self.min - self.max) / (self.max - self.min)
        }
    }

    /// `[-1, 1]` back to original units.
    pub fn invert(&self, u: T) -> T {
        ((self.max - self.min) * u + self.min + self.max) / T::lit(2.0)
    }
}

/// Rescales `xs` linearly so that its minimum maps to -1 and its maximum to 1.
pub fn rescale_covariate<T: Real>(xs: &[T]) -> Result<(Vec<T>, AffineMap<T>), TransformError> {
    check_finite(xs, 2)?;
    let min = xs.iter().copied().fold(T::infinity(), T::min);
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    let map = AffineMap::new(min, max)?;
    Ok((xs.iter().map(|&x| map.apply(x)).collect(), map))
}

/// Location-scale record `z = (y - location) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardization<T> {
    pub location: T,
    pub scale: T,
}

impl<T: Real> Standardization<T> {
    pub fn identity() -> Self {
        Self {
            location: T::zero(),
            scale: T::one(),
        }
    }

    pub fn apply(&self, y: T) -> T {
        (y - self.location) / self.scale
    }

    pub fn invert(&self, z: T) -> T {
        self.location + self.scale * z
    }
}

/// Centers by the sample mean and scales by the sample standard deviation
/// (`n - 1` denominator).
pub fn standardize<T: Real>(ys: &[T]) -> Result<(Vec<T>, Standardization<T>), TransformError> {
    check_finite(ys, 2)?;
    let n = T::lit(ys.len() as f64);
    let mean = ys.iter().copied().sum::<T>() / n;
    let ss: T = ys.iter().map(|&y| (y - mean) * (y - mean)).sum();
    let sd = (ss / (n - T::one())).sqrt();
    if !(sd > T::zero()) || ys.iter().all(|&y| y == ys[0]) {
        return Err(TransformError::ZeroVariance);
    }
    let st = Standardization {
        location: mean,
        scale: sd,
    };
    Ok((ys.iter().map(|&y| st.apply(y)).collect(), st))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescale_examples() {
        let (v, map) = rescale_covariate::<f64>(&[46.75, 80.83, 63.79]).unwrap();
        assert_eq!(v[0], -1.0);
        assert_eq!(v[1], 1.0);
        assert!(v[2].abs() < 1e-12);
        assert!((map.invert(v[2]) - 63.79).abs() < 1e-12);

        let (v, _) = rescale_covariate(&[-1.0, 1.0]).unwrap();
        assert_eq!(v, vec![-1.0, 1.0]);
        let (v, _) = rescale_covariate(&[0.0, 10.0, 5.0]).unwrap();
        assert_eq!(v, vec![-1.0, 1.0, 0.0]);
        assert_eq!(
            rescale_covariate(&[3.0, 3.0]).unwrap_err(),
            TransformError::ConstantCovariate
        );
    }

    #[test]
    fn standardize_examples() {
        let (z, st) = standardize(&[0.0, 2.0]).unwrap();
        assert_eq!(st.location, 1.0);
        assert!((st.scale - 2f64.sqrt()).abs() < 1e-15);
        assert!((z[0] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((z[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(
            standardize(&[5.0, 5.0, 5.0]).unwrap_err(),
            TransformError::ZeroVariance
        );
        assert!(standardize(&[1.0]).is_err());
        assert_eq!(
            standardize(&[1.0, f64::NAN]).unwrap_err(),
            TransformError::NonFinite(1)
        );
    }
}
