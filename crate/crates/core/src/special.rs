//! Special functions, evaluated in double precision.

use statrs::function::{beta, erf};

use crate::scalar::Real;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf<T: Real>(z: T) -> T {
    T::lit(INV_SQRT_2PI) * (-(z * z) * T::lit(0.5)).exp()
}

/// Standard normal distribution function, accurate in both tails.
#[inline]
pub fn std_normal_cdf<T: Real>(z: T) -> T {
    let z = z.as_f64();
    T::lit(0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2))
}

/// Inverse of [`std_normal_cdf`] on `(0, 1)`.
pub fn std_normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut z = -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p);
    // polish against the more accurate distribution function
    for _ in 0..2 {
        let dens = std_normal_pdf(z);
        if dens <= 0.0 {
            break;
        }
        let err = if z > 0.0 {
            (1.0 - p) - std_normal_cdf(-z)
        } else {
            std_normal_cdf(z) - p
        };
        z -= err / dens;
    }
    z
}

/// `ln B(a, b)` for positive shapes.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    beta::ln_beta(a, b)
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        beta::beta_reg(a, b, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_reference_values() {
        assert!((std_normal_cdf(0.0_f64) - 0.5).abs() < 1e-16);
        assert!((std_normal_cdf(1.0_f64) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((std_normal_cdf(-8.0_f64) - 6.220_960_574_271_785e-16).abs() < 1e-28);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-10, 0.01, 0.3, 0.5, 0.77, 0.999] {
            let z = std_normal_quantile(p);
            assert!((std_normal_cdf(z) - p).abs() < 1e-12 * p.max(1e-3));
        }
    }
}
