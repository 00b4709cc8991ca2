//! Operations building new models out of existing ones.
//!
//! Each transform acts on `Q` and `q` directly; none of them needs a cdf.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::prob::Prob;
use crate::quadrature::{integrate, integrate_half_line, QuadratureConfig};
use crate::scalar::Real;

use super::{probe_levels, QuantileModel};

/// `Y = a X + b` with `a > 0`, `b >= 0`.
pub fn affine<T: Real>(model: &QuantileModel<T>, a: T, b: T) -> Result<QuantileModel<T>> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::param("affine", "a", format!("must be > 0, got {a}")));
    }
    if !(b >= T::zero()) || !b.is_finite() {
        return Err(Error::param("affine", "b", format!("must be >= 0, got {b}")));
    }
    let (qf, qd) = (model.quantile_curve(), model.density_curve());
    let mut out = QuantileModel::new(
        "affine",
        vec![("a".into(), a), ("b".into(), b)],
        move |p| a * qf(p) + b,
        move |p| a * qd(p),
        a * model.support_floor() + b,
    )
    .with_label(format!("affine({model},a={a},b={b})"));
    if let Some(cf) = model.closed_form_fn() {
        out = out.with_closed_form(move |al| a * cf(al));
    }
    if let Some(dcf) = model.dynamic_closed_form_fn() {
        out = out.with_dynamic_closed_form(move |al, at| a * dcf(al, at));
    }
    if let Some(s) = model.survival_fn() {
        out = out.with_survival(move |x| s((x - b) / a));
    }
    Ok(out)
}

/// `Q = Q1 + Q2`, the quantile function of a comonotone sum.
pub fn sum_compose<T: Real>(m1: &QuantileModel<T>, m2: &QuantileModel<T>) -> QuantileModel<T> {
    let (q1, q2) = (m1.quantile_curve(), m2.quantile_curve());
    let (d1, d2) = (m1.density_curve(), m2.density_curve());
    let mut out = QuantileModel::new(
        "sum",
        Vec::new(),
        move |p| q1(p) + q2(p),
        move |p| d1(p) + d2(p),
        m1.support_floor() + m2.support_floor(),
    )
    .with_label(format!("sum({m1},{m2})"));
    if let (Some(c1), Some(c2)) = (m1.closed_form_fn(), m2.closed_form_fn()) {
        out = out.with_closed_form(move |al| c1(al) + c2(al));
    }
    if let (Some(c1), Some(c2)) = (m1.dynamic_closed_form_fn(), m2.dynamic_closed_form_fn()) {
        out = out.with_dynamic_closed_form(move |al, at| c1(al, at) + c2(al, at));
    }
    out
}

fn require_positive<T: Real>(model: &QuantileModel<T>) -> Result<()> {
    for p in probe_levels::<T>() {
        let value = model.quantile_at(p);
        if !(value > T::zero()) {
            return Err(Error::NonPositiveQuantile {
                what: model.label().to_string(),
                u: p.u().as_f64(),
                value: value.as_f64(),
            });
        }
    }
    Ok(())
}

/// `Q = Q1 Q2` for two positive quantile functions.
pub fn product_compose<T: Real>(m1: &QuantileModel<T>, m2: &QuantileModel<T>) -> Result<QuantileModel<T>> {
    require_positive(m1)?;
    require_positive(m2)?;
    let (q1, q2) = (m1.quantile_curve(), m2.quantile_curve());
    let (d1, d2) = (m1.density_curve(), m2.density_curve());
    let (qq1, qq2) = (Arc::clone(&q1), Arc::clone(&q2));
    Ok(QuantileModel::new(
        "product",
        Vec::new(),
        move |p| q1(p) * q2(p),
        move |p| qq1(p) * d2(p) + qq2(p) * d1(p),
        m1.support_floor() * m2.support_floor(),
    )
    .with_label(format!("product({m1},{m2})")))
}

/// `Y = 1 / X`, so `Q_Y(u) = 1 / Q(1 - u)`.
pub fn reciprocal<T: Real>(model: &QuantileModel<T>) -> Result<QuantileModel<T>> {
    require_positive(model)?;
    let (qf, qd) = (model.quantile_curve(), model.density_curve());
    let qf2 = Arc::clone(&qf);
    let quantile = move |p: Prob<T>| qf(p.flip()).recip();
    // Q(0+) of the reciprocal is 1/Q(1-), taken at the clamped lower level.
    let floor = quantile(Prob::new(T::zero()));
    let mut out = QuantileModel::new(
        "reciprocal",
        Vec::new(),
        quantile,
        move |p| {
            let m = p.flip();
            let x = qf2(m);
            qd(m) / (x * x)
        },
        floor,
    )
    .with_label(format!("reciprocal({model})"));
    if let Some(s) = model.survival_fn() {
        out = out.with_survival(move |y| {
            if y <= T::zero() {
                T::one()
            } else {
                T::one() - s(y.recip())
            }
        });
    }
    Ok(out)
}

/// Proportional hazards model: `Q_Y(u) = Q_X(1 - (1 - u)^(1/theta))`.
pub fn phm<T: Real>(model: &QuantileModel<T>, theta: T) -> Result<QuantileModel<T>> {
    if !(theta > T::zero()) || !theta.is_finite() {
        return Err(Error::param("phm", "theta", format!("must be > 0, got {theta}")));
    }
    let (qf, qd) = (model.quantile_curve(), model.density_curve());
    let exponent = theta.recip() - T::one();
    let mut out = QuantileModel::new(
        "phm",
        vec![("theta".into(), theta)],
        move |p: Prob<T>| qf(p.phm(theta)),
        move |p: Prob<T>| qd(p.phm(theta)) * (exponent * p.ln_v()).exp() / theta,
        model.support_floor(),
    )
    .with_label(format!("phm({model},theta={theta})"));
    if let Some(s) = model.survival_fn() {
        out = out.with_survival(move |x| s(x).powf(theta));
    }
    Ok(out)
}

/// `Y = zeta(X)` for an increasing `zeta` whose derivative the caller supplies.
pub fn monotone_transform<T, Z, D>(model: &QuantileModel<T>, zeta: Z, zeta_prime: D) -> Result<QuantileModel<T>>
where
    T: Real,
    Z: Fn(T) -> T + Send + Sync + 'static,
    D: Fn(T) -> T + Send + Sync + 'static,
{
    for p in probe_levels::<T>() {
        let slope = zeta_prime(model.quantile_at(p));
        if !(slope > T::zero()) {
            return Err(Error::NonMonotone {
                u: p.u().as_f64(),
                value: slope.as_f64(),
            });
        }
    }
    let floor = zeta(model.support_floor());
    let (qf, qd) = (model.quantile_curve(), model.density_curve());
    let qf2 = Arc::clone(&qf);
    Ok(QuantileModel::new(
        "monotone",
        Vec::new(),
        move |p| zeta(qf(p)),
        move |p| qd(p) * zeta_prime(qf2(p)),
        floor,
    )
    .with_label(format!("monotone({model})")))
}

/// Escort model with the default quadrature settings; see [`escort_with`].
pub fn escort<T: Real>(model: &QuantileModel<T>, c: T) -> Result<QuantileModel<T>> {
    escort_with(model, c, &QuadratureConfig::default())
}

/// Escort of order `c`: quantile density `q(u)^c N(c)` with
/// `N(c) = int_0^1 q(p)^(1-c) dp`.
///
/// Fails with [`Error::Divergence`] when the normalizer does not converge.
pub fn escort_with<T: Real>(model: &QuantileModel<T>, c: T, cfg: &QuadratureConfig<T>) -> Result<QuantileModel<T>> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::param("escort", "c", format!("must be > 0, got {c}")));
    }
    let label = format!("escort({model},c={c})");
    if c == T::one() {
        return Ok(model.clone().with_label(label));
    }
    let qd = model.density_curve();
    let norm = integrate_half_line(
        |t| {
            let q = qd(Prob::from_log_survival(t));
            (-t).exp() * crate::scalar::pow0(q, T::one() - c)
        },
        T::lit(4.0),
        cfg,
        "escort normalizer",
    )?
    .value;
    let floor = model.support_floor();
    let qd_inner = Arc::clone(&qd);
    let cfg = *cfg;
    let quantile = move |p: Prob<T>| {
        let lower = integrate(
            |t: T| (-t).exp() * crate::scalar::pow0(qd_inner(Prob::from_log_survival(t)), c),
            T::zero(),
            p.log_survival(),
            &cfg,
            "escort quantile",
        )
        .map(|r| r.value)
        .unwrap_or(T::nan());
        floor + norm * lower
    };
    Ok(QuantileModel::new(
        "escort",
        vec![("c".into(), c)],
        quantile,
        move |p| crate::scalar::pow0(qd(p), c) * norm,
        floor,
    )
    .with_label(label))
}
