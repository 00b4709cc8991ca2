//! Fractional cumulative residual entropy for distributions given by their
//! quantile functions.
//!
//! Models carry `Q(u)` and `q(u) = Q'(u)` ([`QuantileModel`]); the entropy of
//! order `alpha` in `[0, 1]` is computed by quadrature in [`entropy`] and
//! estimated from samples in [`estimator`]. The numerical core is generic over
//! [`Real`] (`f32`, `f64`); the aliases at the bottom fix it to `f64`.
//!
//! ```
//! use qfcre::{entropy::qfcre, make_builtin, Config, Order};
//! let m = make_builtin("uniform", &[("b", 1.0)]).unwrap();
//! let e = qfcre(&m, Order::new(1.0).unwrap(), &Config::forced()).unwrap();
//! assert!((e.value - 0.25).abs() < 1e-10);
//! ```

// `!(x > 0)` is the idiom here for rejecting NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos;
pub mod entropy;
pub mod error;
pub mod estimator;
pub mod finance;
pub mod model;
pub mod order;
pub mod prob;
pub mod quadrature;
pub mod scalar;
pub mod simulation;
pub mod table;
pub mod verify;

pub use entropy::{EntropyValue, Method, Trend};
pub use error::{Error, Result};
pub use estimator::{EntropyEstimate, SampleData, SpacingConvention};
pub use model::{
    affine, escort, escort_with, hazard_quantile, make_builtin, monotone_transform, phm, product_compose, reciprocal,
    reference_models, sum_compose, ModelSpec, QuantileModel, BUILTIN_MODELS,
};
pub use order::FractionalOrder;
pub use prob::Prob;
pub use quadrature::{integrate, integrate_half_line, Integral, QuadratureConfig};
pub use scalar::Real;

pub type Model = QuantileModel<f64>;
pub type Order = FractionalOrder<f64>;
pub type Config = QuadratureConfig<f64>;
pub type Sample = SampleData<f64>;
pub type Entropy = EntropyValue<f64>;
pub type Estimate = EntropyEstimate<f64>;
