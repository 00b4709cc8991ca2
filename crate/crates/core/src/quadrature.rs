//! Adaptive Gauss–Kronrod quadrature on finite intervals and on `[0, inf)`.
//!
//! Finite intervals use a global adaptive scheme: the 7-point Gauss / 15-point
//! Kronrod pair gives a value and an embedded error estimate per interval, and
//! the interval with the largest estimate is halved until the summed estimate
//! meets `max(abs_tol, rel_tol * |I|)`.
//!
//! Half-line integrals are split into panels `[0,1], [1,2], [2,4], ...`. The
//! first panel is integrated in the variable `s` with `t = s^gamma` to soften
//! the `t^alpha` corner at the origin; panels are added until one contributes
//! less than `abs_tol` (or until `tail_cut` when one is configured).

use crate::error::{Error, Result};
use crate::scalar::Real;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Hard cap on live subintervals of one finite integral.
const MAX_INTERVALS: usize = 5_000;

/// Tolerances and limits for every integral computed by the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Maximum bisection depth of any subinterval.
    pub max_refinements: u32,
    /// Fixed truncation point of half-line integrals; `None` extends panels
    /// until one contributes less than `abs_tol`.
    pub tail_cut: Option<T>,
    /// Use a model's closed form, when it has one, instead of integrating.
    pub use_closed_form: bool,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-8),
            abs_tol: T::lit(1e-12),
            max_refinements: 60,
            tail_cut: None,
            use_closed_form: true,
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    /// Default tolerances, always integrating.
    pub fn forced() -> Self {
        Self {
            use_closed_form: false,
            ..Self::default()
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) {
            return Err(Error::InvalidConfig("rel_tol must be positive".into()));
        }
        if !(self.abs_tol > T::zero()) {
            return Err(Error::InvalidConfig("abs_tol must be positive".into()));
        }
        if self.max_refinements < 1 {
            return Err(Error::InvalidConfig("max_refinements must be at least 1".into()));
        }
        if let Some(cut) = self.tail_cut {
            if !(cut > T::zero()) {
                return Err(Error::InvalidConfig("tail_cut must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Value of an integral with its estimated absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_error: T,
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    depth: u32,
}

fn kronrod15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);

    let mut res_g = fc * T::lit(WG[3]);
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];

    for (j, &wg) in WG.iter().take(3).enumerate() {
        let k = 2 * j + 1;
        let dx = half_len * T::lit(XGK[k]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[k] = f1;
        fv2[k] = f2;
        res_g = res_g + T::lit(wg) * (f1 + f2);
        res_k = res_k + T::lit(WGK[k]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[k]) * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let k = 2 * j;
        let dx = half_len * T::lit(XGK[k]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[k] = f1;
        fv2[k] = f2;
        res_k = res_k + T::lit(WGK[k]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[k]) * (f1.abs() + f2.abs());
    }

    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
    for k in 0..7 {
        res_asc = res_asc + T::lit(WGK[k]) * ((fv1[k] - mean).abs() + (fv2[k] - mean).abs());
    }

    let scale = half_len.abs();
    let value = res_k * half_len;
    res_abs = res_abs * scale;
    res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        err = res_asc * T::one().min((T::lit(200.0) * err / res_asc).powf(T::lit(1.5)));
    }
    let eps50 = T::epsilon() * T::lit(50.0);
    if res_abs > T::min_positive_value() / eps50 {
        err = err.max(eps50 * res_abs);
    }
    (value, err)
}

fn divergence<T: Real>(what: &str, value: T, error: T) -> Error {
    Error::Divergence {
        what: what.to_string(),
        partial: value.as_f64(),
        error: error.as_f64(),
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
///
/// `what` names the integral in divergence diagnostics.
pub fn integrate<T, F>(f: F, a: T, b: T, cfg: &QuadratureConfig<T>, what: &str) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    cfg.validate()?;
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            abs_error: T::zero(),
        });
    }

    let (value, error) = kronrod15(&f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        value,
        error,
        depth: 0,
    }];

    let mut total = value;
    let mut total_err = error;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(divergence(what, total, total_err));
        }
        if total_err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            total = panels.iter().map(|p| p.value).sum();
            total_err = panels.iter().map(|p| p.error).sum();
            return Ok(Integral {
                value: total,
                abs_error: total_err,
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.depth < cfg.max_refinements)
            .max_by(|(_, x), (_, y)| x.error.partial_cmp(&y.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        let Some(idx) = worst else {
            return Err(divergence(what, total, total_err));
        };
        if panels.len() >= MAX_INTERVALS {
            return Err(divergence(what, total, total_err));
        }

        let p = panels.swap_remove(idx);
        let mid = T::lit(0.5) * (p.a + p.b);
        if !(mid > p.a.min(p.b) && mid < p.a.max(p.b)) {
            // Interval exhausted at working precision; keep it but stop refining it.
            panels.push(Panel {
                depth: cfg.max_refinements,
                ..p
            });
            continue;
        }
        let (v1, e1) = kronrod15(&f, p.a, mid);
        let (v2, e2) = kronrod15(&f, mid, p.b);
        total = total - p.value + v1 + v2;
        total_err = total_err - p.error + e1 + e2;
        panels.push(Panel {
            a: p.a,
            b: mid,
            value: v1,
            error: e1,
            depth: p.depth + 1,
        });
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: v2,
            error: e2,
            depth: p.depth + 1,
        });
    }
}

/// Integrate `f` over `[0, inf)`.
///
/// `first_power` is the exponent `gamma >= 1` of the substitution `t = s^gamma`
/// applied on the first unit panel. Fails with [`Error::Divergence`] when the
/// panels still contribute more than `abs_tol` at the largest `t` for which
/// `exp(-t)` is representable.
pub fn integrate_half_line<T, F>(f: F, first_power: T, cfg: &QuadratureConfig<T>, what: &str) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    cfg.validate()?;
    let gamma = first_power.max(T::one());
    let limit = cfg.tail_cut.unwrap_or_else(T::log_tail_limit);
    let first_end = T::one().min(limit);

    let s_end = first_end.powf(gamma.recip());
    let head = integrate(
        |s: T| {
            let t = s.powf(gamma);
            let jac = gamma * s.powf(gamma - T::one());
            let y = f(t);
            if jac == T::zero() {
                T::zero()
            } else {
                y * jac
            }
        },
        T::zero(),
        s_end,
        cfg,
        what,
    )?;

    let mut value = head.value;
    let mut error = head.abs_error;
    let mut lo = first_end;
    while lo < limit {
        let hi = (lo + lo).min(limit);
        let seg = integrate(&f, lo, hi, cfg, what)?;
        value = value + seg.value;
        error = error + seg.abs_error;
        lo = hi;
        if cfg.tail_cut.is_none() && seg.value.abs() < cfg.abs_tol {
            return Ok(Integral {
                value,
                abs_error: error + seg.value.abs(),
            });
        }
    }
    if cfg.tail_cut.is_some() {
        return Ok(Integral {
            value,
            abs_error: error,
        });
    }
    Err(divergence(what, value, error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gamma;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x: f64| 3.0 * x * x, 0.0, 2.0, &cfg(), "poly").unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 x^-0.5 = 2
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &cfg(), "sqrt").unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn log_singularity() {
        // int_0^1 ln x = -1
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, &cfg(), "log").unwrap();
        assert!((r.value + 1.0).abs() < 1e-8);
    }

    #[test]
    fn half_line_gamma_integrals() {
        for &a in &[0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
            let r = integrate_half_line(
                |t: f64| (-2.0 * t).exp() * t.powf(a),
                1.0 / (1.0 - a / 2.0),
                &cfg(),
                "gamma",
            )
            .unwrap();
            let exact = gamma(a + 1.0) / 2f64.powf(a + 1.0);
            assert!((r.value - exact).abs() < 1e-10 * exact, "a={a}: {} vs {exact}", r.value);
            assert!(r.abs_error >= 0.0);
        }
    }

    #[test]
    fn slow_exponential_tail() {
        // int_0^inf t e^{-0.1 t} = 100
        let r = integrate_half_line(|t: f64| t * (-0.1 * t).exp(), 1.0, &cfg(), "slow").unwrap();
        assert!((r.value - 100.0).abs() < 1e-6);
    }

    #[test]
    fn growing_integrand_diverges() {
        let r = integrate_half_line(|t: f64| (0.5 * t).exp(), 1.0, &cfg(), "grow");
        assert!(matches!(r, Err(Error::Divergence { .. })));
    }

    #[test]
    fn tail_cut_truncates() {
        let c = QuadratureConfig {
            tail_cut: Some(3.0),
            ..cfg()
        };
        let r = integrate_half_line(|t: f64| (-t).exp(), 1.0, &c, "cut").unwrap();
        assert!((r.value - (1.0 - (-3.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn nan_integrand_is_divergence() {
        let r = integrate(|_x: f64| f64::NAN, 0.0, 1.0, &cfg(), "nan");
        assert!(matches!(r, Err(Error::Divergence { .. })));
    }

    #[test]
    fn bad_config_rejected() {
        let c = QuadratureConfig { rel_tol: 0.0, ..cfg() };
        assert!(integrate(|x: f64| x, 0.0, 1.0, &c, "x").is_err());
        let c = QuadratureConfig {
            max_refinements: 0,
            ..cfg()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_precision_works() {
        let c = QuadratureConfig::<f32> {
            rel_tol: 1e-5,
            abs_tol: 1e-7,
            ..Default::default()
        };
        let r = integrate_half_line(|t: f32| (-t).exp(), 1.0, &c, "f32").unwrap();
        assert!((r.value - 1.0).abs() < 1e-5);
    }
}
