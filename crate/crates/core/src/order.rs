use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The fractional order `alpha`, always in `[0, 1]`.
///
/// `alpha = 0` reduces the measure to the mean excess over the support floor,
/// `alpha = 1` to the cumulative residual entropy.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct FractionalOrder<T>(T);

impl<T: Real> FractionalOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha.is_nan() || alpha < T::zero() || alpha > T::one() {
            return Err(Error::InvalidOrder(alpha.as_f64()));
        }
        Ok(Self(alpha))
    }

    pub fn one() -> Self {
        Self(T::one())
    }

    pub fn zero() -> Self {
        Self(T::zero())
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    /// `{0.1, 0.2, ..., 1.0}` or any other evenly spaced grid of `count` points ending at 1.
    pub fn grid(count: usize) -> Vec<Self> {
        (1..=count)
            .map(|k| Self(T::from_count(k) / T::from_count(count)))
            .collect()
    }
}

impl<T: Real> fmt::Display for FractionalOrder<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<f64> for FractionalOrder<f64> {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(FractionalOrder::new(-0.01_f64).is_err());
        assert!(FractionalOrder::new(1.5_f64).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
        assert_eq!(FractionalOrder::new(0.0_f64).unwrap().value(), 0.0);
        assert_eq!(FractionalOrder::new(1.0_f32).unwrap().value(), 1.0);
    }

    #[test]
    fn grid_ends_at_one() {
        let g = FractionalOrder::<f64>::grid(10);
        assert_eq!(g.len(), 10);
        assert!((g[0].value() - 0.1).abs() < 1e-15);
        assert_eq!(g[9].value(), 1.0);
    }
}
