//! B-spline bases on `[-1, 1]` with clamped (repeated) boundary knots.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BSplineError {
    #[error("covariate value {0} lies outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("spline order must be at least 1")]
    InvalidOrder,
    #[error("interior knots must be finite, strictly inside (-1, 1) and nondecreasing")]
    InvalidKnots,
    #[error("output buffer has length {got}, basis dimension is {expected}")]
    BufferLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BSplineBasis<T> {
    order: usize,
    interior_knots: Vec<T>,
    /// Full knot vector including `order` copies of each boundary.
    knots: Vec<T>,
}

impl<T: Real> BSplineBasis<T> {
    /// Cubic basis with no interior knots (the cubic Bernstein polynomials).
    pub fn cubic() -> Self {
        Self::new(4, Vec::new()).expect("valid default basis")
    }

    pub fn new(order: usize, interior_knots: Vec<T>) -> Result<Self, BSplineError> {
        if order == 0 {
            return Err(BSplineError::InvalidOrder);
        }
        let ok = interior_knots
            .iter()
            .all(|k| k.is_finite() && *k > -T::one() && *k < T::one())
            && interior_knots.windows(2).all(|w| w[0] <= w[1]);
        if !ok {
            return Err(BSplineError::InvalidKnots);
        }
        let mut knots = vec![-T::one(); order];
        knots.extend(interior_knots.iter().copied());
        knots.extend(std::iter::repeat_n(T::one(), order));
        Ok(Self {
            order,
            interior_knots,
            knots,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn interior_knots(&self) -> &[T] {
        &self.interior_knots
    }

    /// Number of basis functions.
    pub fn dim(&self) -> usize {
        self.interior_knots.len() + self.order
    }

    /// Basis values at `x`.
    pub fn design(&self, x: T) -> Result<Vec<T>, BSplineError> {
        let mut out = vec![T::zero(); self.dim()];
        self.design_into(x, &mut out)?;
        Ok(out)
    }

    /// Writes the basis values at `x` into `out` (length [`Self::dim`]).
    pub fn design_into(&self, x: T, out: &mut [T]) -> Result<(), BSplineError> {
        if out.len() != self.dim() {
            return Err(BSplineError::BufferLength {
                expected: self.dim(),
                got: out.len(),
            });
        }
        if !(x >= -T::one() && x <= T::one()) {
            return Err(BSplineError::OutOfDomain(x.as_f64()));
        }
        out.iter_mut().for_each(|v| *v = T::zero());

        let p = self.order - 1;
        let t = &self.knots;
        // knot span: t[span] <= x < t[span + 1], last nonempty span at x = 1
        let span = {
            let last = self.dim() - 1;
            if x >= t[last + 1] {
                last
            } else {
                let mut s = p;
                while s < last && x >= t[s + 1] {
                    s += 1;
                }
                s
            }
        };

        // Triangular Cox-de Boor evaluation of the p + 1 nonzero functions.
        let mut n = vec![T::zero(); p + 1];
        let mut left = vec![T::zero(); p + 1];
        let mut right = vec![T::zero(); p + 1];
        n[0] = T::one();
        for j in 1..=p {
            left[j] = x - t[span + 1 - j];
            right[j] = t[span + j] - x;
            let mut saved = T::zero();
            for r in 0..j {
                let denom = right[r + 1] + left[j - r];
                let temp = if denom == T::zero() {
                    T::zero()
                } else {
                    n[r] / denom
                };
                n[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            n[j] = saved;
        }
        for (r, v) in n.into_iter().enumerate() {
            out[span - p + r] = v;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bernstein(x: f64) -> [f64; 4] {
        let t = (x + 1.0) / 2.0;
        let s = 1.0 - t;
        [s * s * s, 3.0 * t * s * s, 3.0 * t * t * s, t * t * t]
    }

    #[test]
    fn cubic_endpoints_and_midpoint() {
        let b = BSplineBasis::<f64>::cubic();
        assert_eq!(b.design(-1.0).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(b.design(1.0).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
        let mid = b.design(0.0).unwrap();
        for (v, e) in mid.iter().zip([0.125, 0.375, 0.375, 0.125]) {
            assert!((v - e).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_bernstein_without_knots() {
        let b = BSplineBasis::<f64>::cubic();
        for i in 0..=200 {
            let x = -1.0 + i as f64 / 100.0;
            let got = b.design(x).unwrap();
            for (g, e) in got.iter().zip(bernstein(x)) {
                assert!((g - e).abs() < 1e-14, "x = {x}");
            }
        }
    }

    #[test]
    fn interior_knots_partition_of_unity() {
        let b = BSplineBasis::<f64>::new(4, vec![-0.5, 0.0, 0.5]).unwrap();
        assert_eq!(b.dim(), 7);
        for i in 0..=400 {
            let x = -1.0 + i as f64 / 200.0;
            let v = b.design(x).unwrap();
            assert!(v.iter().all(|&e| e >= 0.0));
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
        // at an interior knot the cubic basis is continuous
        let below = b.design(0.0 - 1e-12).unwrap();
        let at = b.design(0.0).unwrap();
        for (l, r) in below.iter().zip(&at) {
            assert!((l - r).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_out_of_domain() {
        let b = BSplineBasis::<f64>::cubic();
        assert_eq!(b.design(1.5).unwrap_err(), BSplineError::OutOfDomain(1.5));
        assert!(b.design(f64::NAN).is_err());
        assert!(BSplineBasis::<f64>::new(4, vec![1.0]).is_err());
        assert!(BSplineBasis::<f64>::new(4, vec![0.5, 0.1]).is_err());
    }
}
