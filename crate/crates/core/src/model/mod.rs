//! Distributions represented by a quantile function and its derivative.
//!
//! A [`QuantileModel`] never inverts a cdf: it carries `Q(u)` and the
//! quantile density `q(u) = dQ/du` directly, both evaluated on [`Prob`]
//! levels so that formulas involving `1 - u` stay accurate in the far tail.

mod catalog;
mod spec;
mod transform;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::order::FractionalOrder;
use crate::prob::Prob;
use crate::scalar::Real;

pub use catalog::{make_builtin, reference_models, BUILTIN_MODELS};
pub use spec::ModelSpec;
pub use transform::{affine, escort, escort_with, monotone_transform, phm, product_compose, reciprocal, sum_compose};

pub(crate) type Curve<T> = Arc<dyn Fn(Prob<T>) -> T + Send + Sync>;
pub(crate) type ClosedForm<T> = Arc<dyn Fn(T) -> T + Send + Sync>;
pub(crate) type DynamicClosedForm<T> = Arc<dyn Fn(T, Prob<T>) -> T + Send + Sync>;
pub(crate) type Survival<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A distribution given by its quantile function `Q` and quantile density `q`.
///
/// Values are immutable once built; cloning shares the underlying closures.
#[derive(Clone)]
pub struct QuantileModel<T> {
    name: String,
    label: String,
    params: Vec<(String, T)>,
    quantile: Curve<T>,
    density: Curve<T>,
    support_floor: T,
    closed_form: Option<ClosedForm<T>>,
    dynamic_closed_form: Option<DynamicClosedForm<T>>,
    survival: Option<Survival<T>>,
}

impl<T: Real> QuantileModel<T> {
    /// Build a model from explicit `Q` and `q` curves.
    ///
    /// The caller is responsible for `q` being the derivative of `Q`; the
    /// property suites check this for every model shipped with the crate.
    pub fn new<Fq, Fd>(
        name: impl Into<String>,
        params: Vec<(String, T)>,
        quantile: Fq,
        density: Fd,
        support_floor: T,
    ) -> Self
    where
        Fq: Fn(Prob<T>) -> T + Send + Sync + 'static,
        Fd: Fn(Prob<T>) -> T + Send + Sync + 'static,
    {
        let name = name.into();
        let label = format_label(&name, &params);
        Self {
            name,
            label,
            params,
            quantile: Arc::new(quantile),
            density: Arc::new(density),
            support_floor,
            closed_form: None,
            dynamic_closed_form: None,
            survival: None,
        }
    }

    /// Attach a closed form `alpha -> Q-FCRE`.
    pub fn with_closed_form<F>(mut self, f: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        self.closed_form = Some(Arc::new(f));
        self
    }

    /// Attach a closed form `(alpha, u) -> Q-DFCRE`.
    pub fn with_dynamic_closed_form<F>(mut self, f: F) -> Self
    where
        F: Fn(T, Prob<T>) -> T + Send + Sync + 'static,
    {
        self.dynamic_closed_form = Some(Arc::new(f));
        self
    }

    /// Attach the survival function `x -> P(X > x)`.
    pub fn with_survival<F>(mut self, f: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        self.survival = Some(Arc::new(f));
        self
    }

    pub(crate) fn with_label(mut self, label: String) -> Self {
        self.label = label;
        self
    }

    /// Zero-width model sitting at `value` (`q = 0`). Used as the additive and
    /// multiplicative identity in tests; it is not part of the named catalog.
    pub fn degenerate(value: T) -> Self {
        Self::new(
            "degenerate",
            vec![("c".into(), value)],
            move |_| value,
            |_| T::zero(),
            value,
        )
        .with_closed_form(|_| T::zero())
        .with_dynamic_closed_form(|_, _| T::zero())
        .with_survival(move |x| if x < value { T::one() } else { T::zero() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `name(k=v,...)`, or a nested description for transformed models.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &[(String, T)] {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<T> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// `Q(0+)`.
    pub fn support_floor(&self) -> T {
        self.support_floor
    }

    /// `Q(u)` for a raw level, clamped away from 0 and 1.
    pub fn quantile(&self, u: T) -> T {
        (self.quantile)(Prob::new(u))
    }

    /// `q(u)` for a raw level, clamped away from 0 and 1.
    pub fn density(&self, u: T) -> T {
        (self.density)(Prob::new(u))
    }

    #[inline]
    pub fn quantile_at(&self, p: Prob<T>) -> T {
        (self.quantile)(p)
    }

    #[inline]
    pub fn density_at(&self, p: Prob<T>) -> T {
        (self.density)(p)
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form.is_some()
    }

    pub fn closed_form_qfcre(&self, alpha: FractionalOrder<T>) -> Option<T> {
        self.closed_form.as_ref().map(|f| f(alpha.value()))
    }

    pub fn closed_form_qdfcre(&self, alpha: FractionalOrder<T>, at: Prob<T>) -> Option<T> {
        self.dynamic_closed_form.as_ref().map(|f| f(alpha.value(), at))
    }

    pub fn has_survival(&self) -> bool {
        self.survival.is_some()
    }

    /// `P(X > x)` when the distribution has one in closed form.
    pub fn survival(&self, x: T) -> Option<T> {
        self.survival.as_ref().map(|f| f(x))
    }

    pub(crate) fn quantile_curve(&self) -> Curve<T> {
        Arc::clone(&self.quantile)
    }

    pub(crate) fn density_curve(&self) -> Curve<T> {
        Arc::clone(&self.density)
    }

    pub(crate) fn closed_form_fn(&self) -> Option<ClosedForm<T>> {
        self.closed_form.clone()
    }

    pub(crate) fn dynamic_closed_form_fn(&self) -> Option<DynamicClosedForm<T>> {
        self.dynamic_closed_form.clone()
    }

    pub(crate) fn survival_fn(&self) -> Option<Survival<T>> {
        self.survival.clone()
    }
}

impl<T: Real> fmt::Debug for QuantileModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantileModel")
            .field("label", &self.label)
            .field("support_floor", &self.support_floor)
            .field("closed_form", &self.closed_form.is_some())
            .finish()
    }
}

impl<T: Real> fmt::Display for QuantileModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn format_label<T: Real>(name: &str, params: &[(String, T)]) -> String {
    let body: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{name}({})", body.join(","))
}

/// Hazard quantile function `H(u) = 1 / ((1 - u) q(u))`.
pub fn hazard_quantile<T: Real>(model: &QuantileModel<T>, u: T) -> Result<T> {
    if !(u > T::zero() && u < T::one()) {
        return Err(Error::ProbabilityOutOfRange(u.as_f64()));
    }
    let p = Prob::new(u);
    let q = model.density_at(p);
    if !(q > T::zero()) {
        return Err(Error::InfiniteHazard { u: u.as_f64() });
    }
    Ok((p.v() * q).recip())
}

/// Interior levels used to probe models for positivity and monotonicity.
pub(crate) fn probe_levels<T: Real>() -> Vec<Prob<T>> {
    let mut out = vec![Prob::new(T::zero())];
    out.extend((1..200).map(|k| Prob::new(T::from_count(k) / T::lit(200.0))));
    out.extend((1..=10).map(|k| Prob::from_complement(T::lit(10f64.powi(-k)))));
    out.push(Prob::new(T::one()));
    out
}
