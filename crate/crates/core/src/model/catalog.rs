use crate::error::{Error, Result};
use crate::prob::Prob;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::scalar::{gamma, Real};

use super::QuantileModel;

/// Names accepted by [`make_builtin`], with their parameter lists.
pub const BUILTIN_MODELS: &[(&str, &[&str])] = &[
    ("uniform", &["b"]),
    ("exponential", &["lambda"]),
    ("power", &["beta", "delta"]),
    ("pareto1", &["beta"]),
    ("rescaled_beta", &["c", "r"]),
    ("lambda_family", &["C", "A", "beta"]),
    ("weibull_family", &["A", "B"]),
    ("power_pareto", &["C", "l1", "l2"]),
    ("govindarajulu", &["theta", "sigma", "beta"]),
    ("linear_mrq", &["a", "b"]),
];

struct Params<'a, T> {
    model: &'a str,
    given: &'a [(&'a str, T)],
}

impl<'a, T: Real> Params<'a, T> {
    fn new(model: &'a str, given: &'a [(&'a str, T)], expected: &[&str]) -> Result<Self> {
        for (i, (k, v)) in given.iter().enumerate() {
            if !expected.contains(k) {
                return Err(Error::param(
                    model,
                    k,
                    format!("is not a parameter (expected {})", expected.join(", ")),
                ));
            }
            if given[..i].iter().any(|(j, _)| j == k) {
                return Err(Error::param(model, k, "given twice"));
            }
            if !v.is_finite() {
                return Err(Error::param(model, k, "must be finite"));
            }
        }
        Ok(Self { model, given })
    }

    fn get(&self, key: &str) -> Result<T> {
        self.given
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::param(self.model, key, "is missing"))
    }

    fn positive(&self, key: &str) -> Result<T> {
        let v = self.get(key)?;
        if v > T::zero() {
            Ok(v)
        } else {
            Err(Error::param(self.model, key, format!("must be > 0, got {v}")))
        }
    }
}

fn owned<T: Real>(given: &[(&str, T)], order: &[&str]) -> Vec<(String, T)> {
    order
        .iter()
        .filter_map(|k| given.iter().find(|(g, _)| g == k).map(|(g, v)| (g.to_string(), *v)))
        .collect()
}

fn q_config<T: Real>() -> QuadratureConfig<T> {
    QuadratureConfig::default()
        .with_rel_tol(T::lit(1e-12).max(T::epsilon() * T::lit(64.0)))
        .with_abs_tol(T::lit(1e-15).max(T::epsilon() * T::epsilon()))
}

/// Construct one of the named catalog models.
///
/// ```
/// let m = qfcre::make_builtin("exponential", &[("lambda", 2.0_f64)]).unwrap();
/// assert!((m.density(0.5) - 1.0).abs() < 1e-15);
/// ```
pub fn make_builtin<T: Real>(name: &str, params: &[(&str, T)]) -> Result<QuantileModel<T>> {
    let expected = BUILTIN_MODELS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, p)| *p)
        .ok_or_else(|| Error::UnknownModel(name.to_string()))?;
    let p = Params::new(name, params, expected)?;
    let stored = owned(params, expected);
    let two = T::lit(2.0);

    let model = match name {
        "uniform" => {
            let b = p.positive("b")?;
            QuantileModel::new(name, stored, move |p: Prob<T>| b * p.u(), move |_| b, T::zero())
                .with_closed_form(move |a| b * gamma(a + T::one()) / two.powf(a + T::one()))
                .with_dynamic_closed_form(move |a, at| at.v() * b * gamma(a + T::one()) / two.powf(a + T::one()))
                .with_survival(move |x| (T::one() - x / b).max(T::zero()).min(T::one()))
        }
        "exponential" => {
            let lambda = p.positive("lambda")?;
            QuantileModel::new(
                name,
                stored,
                move |p: Prob<T>| p.log_survival() / lambda,
                move |p: Prob<T>| (lambda * p.v()).recip(),
                T::zero(),
            )
            .with_closed_form(move |a| gamma(a + T::one()) / lambda)
            .with_dynamic_closed_form(move |a, _| gamma(a + T::one()) / lambda)
            .with_survival(move |x| (-lambda * x.max(T::zero())).exp())
        }
        "power" => {
            let beta = p.positive("beta")?;
            let delta = p.positive("delta")?;
            QuantileModel::new(
                name,
                stored,
                move |p: Prob<T>| beta * (delta * p.ln_u()).exp(),
                move |p: Prob<T>| beta * delta * ((delta - T::one()) * p.ln_u()).exp(),
                T::zero(),
            )
            .with_survival(move |x| {
                let ratio = (x / beta).max(T::zero()).min(T::one());
                T::one() - ratio.powf(delta.recip())
            })
        }
        "pareto1" => {
            let beta = p.positive("beta")?;
            let m = QuantileModel::new(
                name,
                stored,
                move |p: Prob<T>| (-beta * p.ln_v()).exp(),
                move |p: Prob<T>| beta * (-(beta + T::one()) * p.ln_v()).exp(),
                T::one(),
            )
            .with_survival(move |x| if x <= T::one() { T::one() } else { x.powf(-beta.recip()) });
            if beta < T::one() {
                let tail = T::one() - beta;
                m.with_closed_form(move |a| beta * gamma(a + T::one()) / tail.powf(a + T::one()))
                    .with_dynamic_closed_form(move |a, at| {
                        beta * (-beta * at.ln_v()).exp() * gamma(a + T::one()) / tail.powf(a + T::one())
                    })
            } else {
                m
            }
        }
        "rescaled_beta" => {
            let c = p.positive("c")?;
            let r = p.positive("r")?;
            let cf = move |a: T, at: Prob<T>| {
                r.powf(a) * c * (at.ln_v() / r).exp() * gamma(a + T::one()) / (r + T::one()).powf(a + T::one())
            };
            QuantileModel::new(
                name,
                stored,
                move |p: Prob<T>| -c * (p.ln_v() / r).exp_m1(),
                move |p: Prob<T>| c / r * ((r.recip() - T::one()) * p.ln_v()).exp(),
                T::zero(),
            )
            .with_closed_form(move |a| cf(a, Prob::from_parts(T::zero(), T::one())))
            .with_dynamic_closed_form(cf)
            .with_survival(move |x| (T::one() - x / c).max(T::zero()).min(T::one()).powf(r))
        }
        "lambda_family" => {
            let scale = p.positive("C")?;
            let a_par = p.get("A")?;
            let beta = p.get("beta")?;
            if beta <= -T::one() {
                return Err(Error::param(name, "beta", format!("must be > -1, got {beta}")));
            }
            lambda_family(name, stored, scale, a_par, beta)
        }
        "weibull_family" => {
            let a_par = p.positive("A")?;
            let b_par = p.get("B")?;
            if b_par >= T::one() {
                return Err(Error::param(name, "B", format!("must be < 1, got {b_par}")));
            }
            weibull_family(name, stored, a_par, b_par)
        }
        "power_pareto" => {
            let c = p.positive("C")?;
            let l1 = p.positive("l1")?;
            let l2 = p.positive("l2")?;
            QuantileModel::new(
                name,
                stored,
                move |p: Prob<T>| c * (l1 * p.ln_u() - l2 * p.ln_v()).exp(),
                move |p: Prob<T>| {
                    let (lu, lv) = (p.ln_u(), p.ln_v());
                    c * (l1 * ((l1 - T::one()) * lu - l2 * lv).exp() + l2 * (l1 * lu - (l2 + T::one()) * lv).exp())
                },
                T::zero(),
            )
        }
        "govindarajulu" => {
            let theta = p.get("theta")?;
            let sigma = p.positive("sigma")?;
            let beta = p.positive("beta")?;
            QuantileModel::new(
                name,
                stored,
                move |p: Prob<T>| theta + sigma * (beta * p.ln_u()).exp() * (T::one() + beta * p.v()),
                move |p: Prob<T>| sigma * beta * (beta + T::one()) * ((beta - T::one()) * p.ln_u()).exp() * p.v(),
                theta,
            )
        }
        "linear_mrq" => {
            let a = p.get("a")?;
            let b = p.get("b")?;
            let s = a + b;
            if !(s > T::lit(4.0)) {
                return Err(Error::param(
                    name,
                    "a",
                    format!("a + b must exceed 4 so that q > 0, got {s}"),
                ));
            }
            let four = T::lit(4.0);
            // Q-DFCRE integrates to G(a+1)[(a+b) - 4(1-u)/2^(a+1)].
            let cf = move |al: T, at: Prob<T>| gamma(al + T::one()) * (s - four * at.v() / two.powf(al + T::one()));
            QuantileModel::new(
                name,
                stored,
                move |p: Prob<T>| s * p.log_survival() - four * p.u(),
                move |p: Prob<T>| s / p.v() - four,
                T::zero(),
            )
            .with_closed_form(move |al| cf(al, Prob::from_parts(T::zero(), T::one())))
            .with_dynamic_closed_form(cf)
        }
        _ => unreachable!("name validated against BUILTIN_MODELS"),
    };
    Ok(model)
}

/// `q(u) = C u^beta (1-u)^-(A+beta)`.
fn lambda_family<T: Real>(name: &str, stored: Vec<(String, T)>, scale: T, a_par: T, beta: T) -> QuantileModel<T> {
    let density = move |p: Prob<T>| scale * (beta * p.ln_u() - (a_par + beta) * p.ln_v()).exp();
    if beta == T::zero() {
        let one_minus = T::one() - a_par;
        let quantile = move |p: Prob<T>| {
            if one_minus == T::zero() {
                scale * p.log_survival()
            } else {
                -scale * (one_minus * p.ln_v()).exp_m1() / one_minus
            }
        };
        let m = QuantileModel::new(name, stored, quantile, density, T::zero());
        if a_par < T::lit(2.0) {
            let rate = T::lit(2.0) - a_par;
            return m
                .with_closed_form(move |a| scale * gamma(a + T::one()) / rate.powf(a + T::one()))
                .with_dynamic_closed_form(move |a, at| {
                    scale * (one_minus * at.ln_v()).exp() * gamma(a + T::one()) / rate.powf(a + T::one())
                });
        }
        return m;
    }

    let quantile = move |p: Prob<T>| {
        let cfg = q_config::<T>();
        let half = T::lit(0.5);
        let bp1 = beta + T::one();
        // Below 1/2: p = w^(1/(beta+1)) removes the p^beta factor.
        let lower_end = p.u().min(half);
        let lower = integrate(
            |w: T| (-(a_par + beta) * (-(w.powf(bp1.recip()))).ln_1p()).exp(),
            T::zero(),
            lower_end.powf(bp1),
            &cfg,
            "lambda_family quantile",
        )
        .map(|r| r.value / bp1)
        .unwrap_or(T::nan());
        if p.u() <= half {
            return scale * lower;
        }
        // Above 1/2: s = -log(1-p).
        let upper = integrate(
            |s: T| (beta * (-(-s).exp()).ln_1p() + (a_par + beta - T::one()) * s).exp(),
            T::lit(2.0).ln(),
            p.log_survival(),
            &cfg,
            "lambda_family quantile",
        )
        .map(|r| r.value)
        .unwrap_or(T::nan());
        scale * (lower + upper)
    };
    QuantileModel::new(name, stored, quantile, density, T::zero())
}

/// `q(u) = (1-u)^-A (-log(1-u))^-B`.
fn weibull_family<T: Real>(name: &str, stored: Vec<(String, T)>, a_par: T, b_par: T) -> QuantileModel<T> {
    let shape = T::one() - b_par;
    let density = move |p: Prob<T>| {
        let t = p.log_survival();
        let shape_part = if b_par == T::zero() { T::one() } else { t.powf(-b_par) };
        (a_par * t).exp() * shape_part
    };
    let quantile = move |p: Prob<T>| {
        let t = p.log_survival();
        if a_par == T::one() {
            return t.powf(shape) / shape;
        }
        // s = w^(1/(1-B)) turns s^-B ds into dw / (1-B).
        integrate(
            |w: T| ((a_par - T::one()) * w.powf(shape.recip())).exp(),
            T::zero(),
            t.powf(shape),
            &q_config::<T>(),
            "weibull_family quantile",
        )
        .map(|r| r.value / shape)
        .unwrap_or(T::nan())
    };
    let mut m = QuantileModel::new(name, stored, quantile, density, T::zero());
    if a_par < T::lit(2.0) {
        let rate = T::lit(2.0) - a_par;
        m = m.with_closed_form(move |a| {
            let k = a - b_par + T::one();
            gamma(k) / rate.powf(k)
        });
    }
    if a_par == T::one() {
        m = m.with_survival(move |x| {
            let x = x.max(T::zero());
            (-(shape * x).powf(shape.recip())).exp()
        });
    }
    m
}

/// The parameterizations used throughout the property suites: the settings
/// of the worked examples, simulation tables and figures.
pub fn reference_models<T: Real>() -> Vec<QuantileModel<T>> {
    let l = T::lit;
    let specs: Vec<(&str, Vec<(&str, T)>)> = vec![
        ("uniform", vec![("b", l(1.0))]),
        ("uniform", vec![("b", l(2.0))]),
        ("exponential", vec![("lambda", l(1.0))]),
        ("exponential", vec![("lambda", l(2.0))]),
        ("power", vec![("beta", l(0.1)), ("delta", l(2.3))]),
        ("pareto1", vec![("beta", l(0.5))]),
        ("rescaled_beta", vec![("c", l(2.0)), ("r", l(2.0))]),
        ("lambda_family", vec![("C", l(2.0)), ("A", l(0.0)), ("beta", l(0.0))]),
        ("lambda_family", vec![("C", l(2.0)), ("A", l(0.5)), ("beta", l(0.0))]),
        ("lambda_family", vec![("C", l(1.0)), ("A", l(1.0)), ("beta", l(0.5))]),
        ("weibull_family", vec![("A", l(1.0)), ("B", l(0.5))]),
        ("weibull_family", vec![("A", l(0.5)), ("B", l(0.0))]),
        ("power_pareto", vec![("C", l(1.5)), ("l1", l(2.0)), ("l2", l(0.25))]),
        (
            "govindarajulu",
            vec![("theta", l(1.0)), ("sigma", l(2.0)), ("beta", l(2.0))],
        ),
        ("linear_mrq", vec![("a", l(2.0)), ("b", l(3.0))]),
    ];
    specs
        .into_iter()
        .map(|(n, p)| make_builtin(n, &p).expect("reference parameters are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_diff(m: &QuantileModel<f64>, u: f64) -> f64 {
        let h = 1e-5 * u.min(1.0 - u);
        (m.quantile(u + h) - m.quantile(u - h)) / (2.0 * h)
    }

    #[test]
    fn worked_values() {
        let e = make_builtin("exponential", &[("lambda", 2.0_f64)]).unwrap();
        assert!((e.density(0.5) - 1.0).abs() < 1e-15);

        let pp = make_builtin("power_pareto", &[("C", 1.5_f64), ("l1", 2.0), ("l2", 0.25)]).unwrap();
        let expected = 1.5 * 0.25 * 2f64.powf(0.25);
        assert!((pp.quantile(0.5) - expected).abs() < 1e-14);

        let g = make_builtin("govindarajulu", &[("theta", 1.0_f64), ("sigma", 2.0), ("beta", 2.0)]).unwrap();
        assert!((g.quantile(1.0) - 3.0).abs() < 1e-9);
        assert_eq!(g.support_floor(), 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            make_builtin("nope", &[("x", 1.0_f64)]),
            Err(Error::UnknownModel(_))
        ));
        assert!(make_builtin("exponential", &[("lambda", 0.0_f64)]).is_err());
        assert!(make_builtin("exponential", &[("lambda", -1.0_f64)]).is_err());
        assert!(make_builtin("exponential", &[("rate", 1.0_f64)]).is_err());
        assert!(make_builtin::<f64>("exponential", &[]).is_err());
        assert!(make_builtin("exponential", &[("lambda", 1.0_f64), ("lambda", 2.0)]).is_err());
        assert!(make_builtin("linear_mrq", &[("a", 2.0_f64), ("b", 2.0)]).is_err());
        assert!(make_builtin("linear_mrq", &[("a", 1.0_f64), ("b", 1.0)]).is_err());
        assert!(make_builtin("weibull_family", &[("A", 1.0_f64), ("B", 1.0)]).is_err());
        assert!(make_builtin("weibull_family", &[("A", 0.0_f64), ("B", 0.0)]).is_err());
        assert!(make_builtin("lambda_family", &[("C", 1.0_f64), ("A", 0.0), ("beta", -1.0)]).is_err());
        assert!(make_builtin("uniform", &[("b", f64::NAN)]).is_err());
    }

    #[test]
    fn monotone_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for m in reference_models::<f64>() {
            for _ in 0..1000 {
                let a: f64 = rng.random_range(1e-6..1.0 - 1e-6);
                let b: f64 = rng.random_range(1e-6..1.0 - 1e-6);
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                assert!(m.quantile(lo) <= m.quantile(hi), "{m}: Q({lo}) > Q({hi})");
                assert!(m.density(lo) >= 0.0);
            }
        }
    }

    #[test]
    fn density_matches_central_difference() {
        for m in reference_models::<f64>() {
            for k in 1..=98 {
                let u = 0.01 * k as f64;
                let fd = central_diff(&m, u);
                let q = m.density(u);
                assert!(
                    (fd - q).abs() <= 1e-5_f64.max(1e-5 * q.abs()),
                    "{m} at u={u}: q={q} fd={fd}"
                );
            }
        }
    }

    #[test]
    fn quantile_increment_matches_density_integral() {
        let cfg = QuadratureConfig::<f64>::default().with_rel_tol(1e-10);
        for m in reference_models::<f64>() {
            for &(a, b) in &[(0.05, 0.2), (0.3, 0.7), (0.6, 0.99), (0.001, 0.999)] {
                let inc = m.quantile(b) - m.quantile(a);
                let int = integrate(|u| m.density(u), a, b, &cfg, "q").unwrap().value;
                assert!(
                    (inc - int).abs() <= 1e-6 * inc.abs().max(1e-12),
                    "{m} on [{a},{b}]: {inc} vs {int}"
                );
            }
        }
    }

    #[test]
    fn q_of_zero_is_support_floor() {
        for m in reference_models::<f64>() {
            // Q is evaluated at the clamped level 1e-12; sqrt-type heads move by ~1e-6 there.
            let q0 = m.quantile(0.0);
            assert!(
                (q0 - m.support_floor()).abs() < 1e-5,
                "{m}: {q0} vs {}",
                m.support_floor()
            );
        }
    }

    #[test]
    fn lambda_family_quadrature_branch_matches_exponential_case() {
        // beta = 0 takes the closed quantile branch; perturb beta slightly to hit quadrature.
        let closed = make_builtin("lambda_family", &[("C", 1.0_f64), ("A", 1.0), ("beta", 0.0)]).unwrap();
        let quad = make_builtin("lambda_family", &[("C", 1.0_f64), ("A", 1.0), ("beta", 1e-9)]).unwrap();
        for &u in &[0.1, 0.5, 0.9, 0.999999] {
            assert!((closed.quantile(u) - quad.quantile(u)).abs() < 1e-6);
        }
    }

    #[test]
    fn far_tail_stays_finite() {
        let p = Prob::<f64>::from_log_survival(300.0);
        for m in reference_models::<f64>() {
            let q = m.density_at(p);
            assert!(q.is_finite() && q >= 0.0, "{m}: {q}");
        }
    }

    #[test]
    fn single_precision_catalog() {
        let m = make_builtin("exponential", &[("lambda", 2.0_f32)]).unwrap();
        assert!((m.density(0.5) - 1.0).abs() < 1e-6);
        let g = make_builtin("govindarajulu", &[("theta", 1.0_f32), ("sigma", 2.0), ("beta", 2.0)]).unwrap();
        assert!((g.quantile(1.0) - 3.0).abs() < 1e-5);
    }
}
