//! Quantile-based fractional cumulative residual entropy and its relatives.
//!
//! Every integral over `p in (0,1)` is computed on `t = -log(1 - p)`, where
//! the weight `(1 - p)(-log(1 - p))^alpha dp` becomes `e^{-2t} t^alpha dt` and
//! the upper-endpoint singularity of most quantile densities disappears.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::QuantileModel;
use crate::order::FractionalOrder;
use crate::prob::Prob;
use crate::quadrature::{integrate, integrate_half_line, QuadratureConfig};
use crate::scalar::{pow0, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Quadrature,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::Oracle => "oracle",
        })
    }
}

/// An entropy value together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyValue<T> {
    pub value: T,
    pub alpha: FractionalOrder<T>,
    pub method: Method,
    /// Estimated absolute error; zero for closed forms.
    pub est_error: T,
}

/// Substitution exponent for the first panel: `t = s^(1/(1 - alpha/2))`
/// turns the `t^alpha` cusp at the origin into a smooth power of `s`.
fn head_power<T: Real>(alpha: T) -> T {
    (T::one() - alpha / T::lit(2.0)).recip()
}

/// `exp(-k t) * q`, formed in log space so that a huge `q` against a tiny
/// exponential neither overflows nor underflows to `0 * inf`.
#[inline]
fn damped<T: Real>(k: T, t: T, q: T) -> T {
    if q == T::zero() {
        T::zero()
    } else {
        (q.ln() - k * t).exp()
    }
}

/// `int_0^inf e^{-2s} s^alpha q(p(s)) ds` with `1 - p(s) = (1 - u) e^{-s}`.
fn weighted_integral<T: Real>(
    model: &QuantileModel<T>,
    alpha: T,
    base: Prob<T>,
    cfg: &QuadratureConfig<T>,
    what: &str,
) -> Result<(T, T)> {
    let two = T::lit(2.0);
    let r = integrate_half_line(
        |s: T| pow0(s, alpha) * damped(two, s, model.density_at(base.advance(s))),
        head_power(alpha),
        cfg,
        what,
    )?;
    Ok((r.value, r.abs_error))
}

/// `int_0^1 (1-p) (-log(1-p))^alpha q(p) dp`.
///
/// ```
/// use qfcre::{entropy::qfcre, make_builtin, FractionalOrder, QuadratureConfig};
/// let m = make_builtin("exponential", &[("lambda", 1.0_f64)]).unwrap();
/// let e = qfcre(&m, FractionalOrder::one(), &QuadratureConfig::forced()).unwrap();
/// assert!((e.value - 1.0).abs() < 1e-9);
/// ```
pub fn qfcre<T: Real>(
    model: &QuantileModel<T>,
    alpha: FractionalOrder<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<EntropyValue<T>> {
    cfg.validate()?;
    if cfg.use_closed_form {
        if let Some(value) = model.closed_form_qfcre(alpha) {
            return Ok(EntropyValue {
                value,
                alpha,
                method: Method::ClosedForm,
                est_error: T::zero(),
            });
        }
    }
    let what = format!("Q-FCRE of {model}");
    let (value, est_error) =
        weighted_integral(model, alpha.value(), Prob::from_parts(T::zero(), T::one()), cfg, &what)?;
    Ok(EntropyValue {
        value,
        alpha,
        method: Method::Quadrature,
        est_error,
    })
}

/// Dynamic (residual) version at level `u`:
/// `(1/(1-u)) int_u^1 (1-p) (log(1-u) - log(1-p))^alpha q(p) dp`.
///
/// At `u = 0` the quadrature path is the same computation as [`qfcre`].
pub fn qdfcre<T: Real>(
    model: &QuantileModel<T>,
    alpha: FractionalOrder<T>,
    u: T,
    cfg: &QuadratureConfig<T>,
) -> Result<EntropyValue<T>> {
    cfg.validate()?;
    if !(u >= T::zero() && u < T::one()) {
        return Err(Error::ProbabilityOutOfRange(u.as_f64()));
    }
    let base = Prob::from_parts(u, T::one() - u);
    if cfg.use_closed_form {
        let closed = model.closed_form_qdfcre(alpha, base).or_else(|| {
            if u == T::zero() {
                model.closed_form_qfcre(alpha)
            } else {
                None
            }
        });
        if let Some(value) = closed {
            return Ok(EntropyValue {
                value,
                alpha,
                method: Method::ClosedForm,
                est_error: T::zero(),
            });
        }
    }
    let what = format!("Q-DFCRE of {model} at u = {u}");
    let (integral, err) = weighted_integral(model, alpha.value(), base, cfg, &what)?;
    Ok(EntropyValue {
        value: base.v() * integral,
        alpha,
        method: Method::Quadrature,
        est_error: base.v() * err,
    })
}

/// Quantile cumulative residual entropy, the `alpha = 1` member.
pub fn qcre<T: Real>(model: &QuantileModel<T>, cfg: &QuadratureConfig<T>) -> Result<EntropyValue<T>> {
    qfcre(model, FractionalOrder::one(), cfg)
}

/// `int_0^1 log q(p) dp`, the differential entropy written through the quantile density.
pub fn quantile_shannon_entropy<T: Real>(model: &QuantileModel<T>, cfg: &QuadratureConfig<T>) -> Result<T> {
    cfg.validate()?;
    let what = format!("quantile differential entropy of {model}");
    let r = integrate_half_line(
        |t: T| (-t).exp() * model.density_at(Prob::from_log_survival(t)).ln(),
        T::lit(2.0),
        cfg,
        &what,
    )?;
    Ok(r.value)
}

/// `exp(int_0^1 log[(1-p)(-log(1-p))^alpha] dp)`, the constant of the
/// lower bound `qfcre >= C(alpha) exp(H)`. Equals `exp(-1 - alpha * gamma_E)`.
pub fn shannon_bound_constant<T: Real>(alpha: FractionalOrder<T>, cfg: &QuadratureConfig<T>) -> Result<T> {
    cfg.validate()?;
    let a = alpha.value();
    let log_weight = integrate_half_line(
        |t: T| {
            if t == T::zero() {
                T::zero()
            } else {
                (-t).exp() * (a * t.ln() - t)
            }
        },
        T::lit(2.0),
        cfg,
        "Shannon bound constant",
    )?;
    Ok(log_weight.value.exp())
}

/// The two factors of the escort decomposition and their product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EscortFactors<T> {
    /// `int_0^1 q(p)^(1-c) dp`.
    pub normalizer: T,
    /// `int_0^1 (1-p)(-log(1-p))^alpha q(p)^c dp`.
    pub tilted: T,
    pub product: T,
}

pub fn escort_factorization<T: Real>(
    model: &QuantileModel<T>,
    c: T,
    alpha: FractionalOrder<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<EscortFactors<T>> {
    cfg.validate()?;
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::param("escort", "c", format!("must be > 0, got {c}")));
    }
    let a = alpha.value();
    // q^(1-c) may carry an integrable power singularity at p = 0; the
    // quartic head substitution flattens it.
    let normalizer = integrate_half_line(
        |t: T| (-t).exp() * pow0(model.density_at(Prob::from_log_survival(t)), T::one() - c),
        T::lit(4.0),
        cfg,
        "escort normalizer",
    )?
    .value;
    let two = T::lit(2.0);
    let tilted = integrate_half_line(
        |t: T| pow0(t, a) * damped(two, t, pow0(model.density_at(Prob::from_log_survival(t)), c)),
        head_power(a),
        cfg,
        "escort tilted entropy",
    )?
    .value;
    Ok(EscortFactors {
        normalizer,
        tilted,
        product: normalizer * tilted,
    })
}

/// `int_0^upper S(x) (-log S(x))^alpha dx` from a survival function.
///
/// An independent route to the same quantity as [`qfcre`] for distributions
/// with a tractable survival function; used to cross-check the quantile
/// route. Fails when the integrand at `upper` is still above `abs_tol`.
pub fn fcre_distribution_oracle<T, S>(
    survival: S,
    alpha: FractionalOrder<T>,
    upper: T,
    cfg: &QuadratureConfig<T>,
) -> Result<EntropyValue<T>>
where
    T: Real,
    S: Fn(T) -> T,
{
    cfg.validate()?;
    if !(upper > T::zero()) || !upper.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "oracle upper limit must be positive, got {upper}"
        )));
    }
    let a = alpha.value();
    let integrand = |x: T| {
        let s = survival(x).max(T::zero()).min(T::one());
        if s == T::zero() {
            T::zero()
        } else {
            s * pow0(-s.ln(), a)
        }
    };

    let tail = integrand(upper);
    if !(tail.abs() <= cfg.abs_tol) {
        return Err(Error::Divergence {
            what: "survival-side integral (tail beyond upper limit)".into(),
            partial: f64::NAN,
            error: tail.as_f64(),
        });
    }

    let mut value = T::zero();
    let mut error = T::zero();
    let mut lo = T::zero();
    let mut hi = T::one().min(upper);
    while lo < upper {
        let r = integrate(integrand, lo, hi, cfg, "survival-side integral")?;
        value = value + r.value;
        error = error + r.abs_error;
        lo = hi;
        hi = (hi + hi).min(upper);
    }
    Ok(EntropyValue {
        value,
        alpha,
        method: Method::Oracle,
        est_error: error,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Trend {
    Increasing,
    Decreasing,
    Constant,
    NonMonotone,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Increasing => "increasing",
            Trend::Decreasing => "decreasing",
            Trend::Constant => "constant",
            Trend::NonMonotone => "non-monotone",
        })
    }
}

/// Successive differences within this absolute tolerance count as ties.
pub const TREND_TOLERANCE: f64 = 1e-9;

/// Classify a sequence by its successive differences.
pub fn classify_trend<T: Real>(values: &[T]) -> Trend {
    let tol = T::lit(TREND_TOLERANCE);
    let (mut up, mut down) = (false, false);
    for w in values.windows(2) {
        let d = w[1] - w[0];
        up |= d > tol;
        down |= d < -tol;
    }
    match (up, down) {
        (false, false) => Trend::Constant,
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        (true, true) => Trend::NonMonotone,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicProfile<T> {
    pub points: Vec<(T, EntropyValue<T>)>,
    pub trend: Trend,
}

/// Q-DFCRE over a strictly increasing grid in `[0, 1)` with its trend.
pub fn qdfcre_profile<T: Real>(
    model: &QuantileModel<T>,
    alpha: FractionalOrder<T>,
    grid: &[T],
    cfg: &QuadratureConfig<T>,
) -> Result<DynamicProfile<T>> {
    if let Some(i) = grid.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig(format!(
            "profile grid must be strictly increasing (index {})",
            i + 1
        )));
    }
    let points = grid
        .iter()
        .map(|&u| qdfcre(model, alpha, u, cfg).map(|e| (u, e)))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<T> = points.iter().map(|(_, e)| e.value).collect();
    Ok(DynamicProfile {
        trend: classify_trend(&values),
        points,
    })
}
