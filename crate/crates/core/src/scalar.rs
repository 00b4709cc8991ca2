//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the models, quadrature and estimators are generic over.
///
/// Implemented for `f32` and `f64`. Special functions (gamma) are evaluated in
/// double precision and rounded back, so `f32` results carry `f32` accuracy.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Lift an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lift a count into `Self`.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest distance kept between a probability level and the endpoints
    /// of (0,1) when a caller hands in a raw `u`.
    fn endpoint_guard() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(4.0))
    }

    /// Largest `t` for which `exp(-t)` is still a normal number, with margin.
    fn log_tail_limit() -> Self {
        -Self::min_positive_value().ln() * Self::lit(0.95)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Gamma function, evaluated in double precision.
pub fn gamma<T: Real>(x: T) -> T {
    T::lit(statrs::function::gamma::gamma(x.as_f64()))
}

/// Euler–Mascheroni constant.
pub fn euler_gamma<T: Real>() -> T {
    T::lit(0.577_215_664_901_532_9)
}

/// `x^y` with the convention `0^0 = 1` and `0^y = 0` for `y > 0`.
#[inline]
pub fn pow0<T: Real>(x: T, y: T) -> T {
    if x <= T::zero() {
        if y == T::zero() {
            T::one()
        } else {
            T::zero()
        }
    } else {
        x.powf(y)
    }
}

/// Relative difference scaled by the larger magnitude (absolute when both are tiny).
pub fn rel_diff<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs()).max(T::one());
    (a - b).abs() / scale
}
