//! Property checks over the reference catalog, reported one line per property.

use std::fmt;

use crate::entropy::{fcre_distribution_oracle, qcre, qdfcre, qfcre, quantile_shannon_entropy, shannon_bound_constant};
use crate::error::Result;
use crate::model::{affine, hazard_quantile, make_builtin, reference_models, sum_compose, QuantileModel};
use crate::order::FractionalOrder;
use crate::quadrature::QuadratureConfig;

type Model = QuantileModel<f64>;
type Order = FractionalOrder<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Counterexamples or a short summary.
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} {}", self.id, self.name)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

struct Tally {
    failures: Vec<String>,
    cases: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            cases: 0,
        }
    }

    fn record(&mut self, ok: Result<bool>, what: impl FnOnce() -> String) {
        self.cases += 1;
        match ok {
            Ok(true) => {}
            Ok(false) => self.failures.push(what()),
            Err(e) => self.failures.push(format!("{} ({e})", what())),
        }
    }

    fn finish(self, id: &'static str, name: &'static str) -> Check {
        let detail = if self.failures.is_empty() {
            format!("{} cases", self.cases)
        } else {
            let shown: Vec<&str> = self.failures.iter().take(4).map(String::as_str).collect();
            let more = self.failures.len().saturating_sub(shown.len());
            let tail = if more > 0 {
                format!(" and {more} more")
            } else {
                String::new()
            };
            format!(
                "{}/{} cases fail, e.g. {}{tail}",
                self.failures.len(),
                self.cases,
                shown.join("; ")
            )
        };
        Check {
            id,
            name,
            passed: self.failures.is_empty(),
            detail,
        }
    }
}

fn builtin(name: &str, params: &[(&str, f64)]) -> Model {
    make_builtin(name, params).expect("fixed parameters are valid")
}

/// Every model of [`reference_models`] that the checks range over.
pub fn catalog() -> Vec<Model> {
    reference_models()
}

/// The orders `0.1, 0.2, ..., 1.0`.
pub fn alpha_grid() -> Vec<Order> {
    Order::grid(10)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn nonnegativity(models: &[Model], cfg: &QuadratureConfig<f64>) -> Check {
    let mut t = Tally::new();
    for m in models {
        for a in std::iter::once(Order::zero()).chain(alpha_grid()) {
            t.record(qfcre(m, a, cfg).map(|e| e.value >= 0.0), || format!("{m} alpha={a}"));
        }
    }
    t.finish("P1", "nonnegativity")
}

fn shift_independence(models: &[Model], cfg: &QuadratureConfig<f64>) -> Check {
    let mut t = Tally::new();
    for m in models {
        let shifted = affine(m, 1.0, 5.0).expect("valid affine");
        for a in alpha_grid() {
            let ok = qfcre(m, a, cfg).and_then(|b| qfcre(&shifted, a, cfg).map(|s| close(s.value, b.value, 1e-8)));
            t.record(ok, || format!("{m} alpha={a}"));
        }
    }
    t.finish("P2", "independent of location shift")
}

fn scale_equivariance(models: &[Model], cfg: &QuadratureConfig<f64>) -> Check {
    let mut t = Tally::new();
    for m in models {
        for scale in [0.5, 3.0] {
            let scaled = affine(m, scale, 1.0).expect("valid affine");
            for a in alpha_grid() {
                let ok = qfcre(m, a, cfg)
                    .and_then(|b| qfcre(&scaled, a, cfg).map(|s| close(s.value, scale * b.value, 1e-8)));
                t.record(ok, || format!("{m} a={scale} alpha={a}"));
            }
        }
    }
    t.finish("P3", "scale equivariance")
}

fn pairs(models: &[Model]) -> Vec<(&Model, &Model)> {
    (0..models.len())
        .map(|i| (&models[i], &models[(i * 7 + 3) % models.len()]))
        .collect()
}

fn additivity(models: &[Model], cfg: &QuadratureConfig<f64>) -> (Check, Check) {
    let (mut sum_t, mut max_t) = (Tally::new(), Tally::new());
    for (m1, m2) in pairs(models) {
        let s = sum_compose(m1, m2);
        for a in alpha_grid() {
            let values = qfcre(m1, a, cfg).and_then(|e1| {
                let e2 = qfcre(m2, a, cfg)?;
                let es = qfcre(&s, a, cfg)?;
                Ok((e1.value, e2.value, es.value))
            });
            let label = || format!("{m1} + {m2} alpha={a}");
            sum_t.record(values.clone().map(|(e1, e2, es)| close(es, e1 + e2, 1e-8)), label);
            max_t.record(values.map(|(e1, e2, es)| es >= e1.max(e2)), label);
        }
    }
    (
        sum_t.finish("P4", "additivity over comonotone sums"),
        max_t.finish("P5", "sum dominates each component"),
    )
}

fn fractional_bounds(models: &[Model], cfg: &QuadratureConfig<f64>) -> (Check, Check) {
    let (mut plain, mut weighted) = (Tally::new(), Tally::new());
    for m in models {
        let ends = qfcre(m, Order::zero(), cfg).and_then(|e0| qcre(m, cfg).map(|e1| (e0.value, e1.value)));
        for a in alpha_grid() {
            let values = ends
                .clone()
                .and_then(|(e0, e1)| qfcre(m, a, cfg).map(|e| (e0, e1, e.value)));
            let (e0, e1, ea) = match values {
                Ok(v) => v,
                Err(e) => {
                    plain.record(Err(e.clone()), || format!("{m} alpha={a}"));
                    weighted.record(Err(e), || format!("{m} alpha={a}"));
                    continue;
                }
            };
            let x = a.value();
            let plain_bound = e1.powf(x);
            plain.record(Ok(ea <= plain_bound * (1.0 + 1e-9)), || {
                format!("{m} alpha={a}: {ea:.6} > {plain_bound:.6}")
            });
            let bound = e0.powf(1.0 - x) * e1.powf(x);
            weighted.record(Ok(ea <= bound * (1.0 + 1e-9)), || {
                format!("{m} alpha={a}: {ea:.6} > {bound:.6}")
            });
        }
    }
    (
        plain.finish("P8", "E_alpha <= E_1^alpha"),
        weighted.finish("P8'", "E_alpha <= E_0^(1-alpha) E_1^alpha"),
    )
}

fn shannon_bound(models: &[Model], cfg: &QuadratureConfig<f64>) -> Check {
    let mut t = Tally::new();
    for m in models {
        let h = quantile_shannon_entropy(m, cfg);
        for a in alpha_grid() {
            let ok = h.clone().and_then(|h| {
                let c = shannon_bound_constant(a, cfg)?;
                let e = qfcre(m, a, cfg)?.value;
                Ok(e >= c * h.exp() * (1.0 - 1e-9))
            });
            t.record(ok, || format!("{m} alpha={a}"));
        }
    }
    t.finish("P9", "E_alpha >= C(alpha) exp(H)")
}

fn hazard_ordering(cfg: &QuadratureConfig<f64>) -> Check {
    let (fast, slow) = (
        builtin("exponential", &[("lambda", 2.0)]),
        builtin("exponential", &[("lambda", 1.0)]),
    );
    let mut t = Tally::new();
    for k in 1..100 {
        let u = k as f64 / 100.0;
        let ok = hazard_quantile(&fast, u).and_then(|h1| hazard_quantile(&slow, u).map(|h2| h1 >= h2));
        t.record(ok, || format!("hazard premise at u={u}"));
    }
    for a in alpha_grid() {
        let ok = qfcre(&fast, a, cfg).and_then(|e1| qfcre(&slow, a, cfg).map(|e2| e1.value <= e2.value));
        t.record(ok, || format!("alpha={a}"));
    }
    t.finish(
        "T1",
        "hazard order reverses entropy order (exponential(2) vs exponential(1))",
    )
}

fn dispersive_ordering(cfg: &QuadratureConfig<f64>) -> Check {
    let (narrow, wide) = (builtin("uniform", &[("b", 1.0)]), builtin("uniform", &[("b", 2.0)]));
    let grid: Vec<f64> = (0..99).map(|k| k as f64 / 100.0).collect();
    let mut t = Tally::new();
    let gaps: Vec<f64> = grid.iter().map(|&u| wide.quantile(u) - narrow.quantile(u)).collect();
    t.record(Ok(gaps.windows(2).all(|w| w[1] >= w[0])), || {
        "dispersive premise".into()
    });
    for a in alpha_grid() {
        for &u in &grid {
            let ok = qdfcre(&narrow, a, u, cfg).and_then(|n| qdfcre(&wide, a, u, cfg).map(|w| n.value <= w.value));
            t.record(ok, || format!("alpha={a} u={u}"));
        }
    }
    t.finish(
        "T6",
        "dispersive order carries to dynamic entropy (uniform(1) vs uniform(2))",
    )
}

fn counterexample(cfg: &QuadratureConfig<f64>) -> (Check, Check) {
    let uni = builtin("uniform", &[("b", 2.0)]);
    let exp = builtin("exponential", &[("lambda", 1.0)]);
    let grid: Vec<f64> = (1..=99).map(|k| k as f64 / 100.0).collect();
    let mut dynamic = Tally::new();
    for a in alpha_grid() {
        for &u in &grid {
            let ok = qdfcre(&uni, a, u, cfg)
                .and_then(|l| qdfcre(&exp, a, u, cfg).map(|r| l.value <= r.value * (1.0 + 1e-12)));
            dynamic.record(ok, || format!("alpha={a} u={u}"));
        }
    }
    let mut hazard = Tally::new();
    for &u in &grid {
        let ok = hazard_quantile(&uni, u).and_then(|hu| {
            let he = hazard_quantile(&exp, u)?;
            Ok(if u < 0.5 {
                hu < he
            } else if u > 0.5 {
                hu > he
            } else {
                (hu - he).abs() <= 1e-12
            })
        });
        hazard.record(ok, || format!("u={u}"));
    }
    (
        dynamic.finish("L1", "dynamic entropy of uniform(2) below exponential(1) at every u"),
        hazard.finish("L2", "hazard order of uniform(2) vs exponential(1) flips at u = 1/2"),
    )
}

/// Survival-side cross-check on the models with a tractable survival function.
pub fn oracle_cases() -> Vec<(Model, f64)> {
    vec![
        (builtin("uniform", &[("b", 2.0)]), 3.0),
        (builtin("exponential", &[("lambda", 1.5)]), 40.0),
        (builtin("weibull_family", &[("A", 1.0), ("B", 0.5)]), 20.0),
        (builtin("pareto1", &[("beta", 0.5)]), 1e9),
    ]
}

fn oracle_equivalence(cfg: &QuadratureConfig<f64>) -> Check {
    let mut t = Tally::new();
    for (m, upper) in oracle_cases() {
        for a in [0.25, 0.5, 0.75, 1.0] {
            let a = Order::new(a).expect("valid order");
            let ok = qfcre(&m, a, cfg).and_then(|q| {
                let surv = |x: f64| m.survival(x).expect("model has a survival function");
                let o = fcre_distribution_oracle(surv, a, upper, cfg)?;
                Ok((o.value - q.value).abs() <= 1e-6 * q.value.max(1.0))
            });
            t.record(ok, || format!("{m} alpha={a}"));
        }
    }
    t.finish("O1", "survival-side and quantile-side values agree")
}

fn derivative_consistency(models: &[Model]) -> Check {
    let mut t = Tally::new();
    for m in models {
        for k in 1..=99 {
            let u = k as f64 / 100.0;
            let h = 1e-5 * u.min(1.0 - u);
            let fd = (m.quantile(u + h) - m.quantile(u - h)) / (2.0 * h);
            let q = m.density(u);
            t.record(Ok((fd - q).abs() <= 1e-5_f64.max(1e-5 * q.abs())), || {
                format!("{m} u={u}")
            });
        }
    }
    t.finish("M1", "quantile density matches difference quotients of Q")
}

/// Run every check with the given quadrature settings (closed forms are
/// bypassed so each value comes from integration).
pub fn property_suite(cfg: &QuadratureConfig<f64>) -> Vec<Check> {
    let cfg = QuadratureConfig {
        use_closed_form: false,
        ..*cfg
    };
    let models = catalog();
    let (p4, p5) = additivity(&models, &cfg);
    let (p8, p8w) = fractional_bounds(&models, &cfg);
    let (l1, l2) = counterexample(&cfg);
    vec![
        derivative_consistency(&models),
        nonnegativity(&models, &cfg),
        shift_independence(&models, &cfg),
        scale_equivariance(&models, &cfg),
        p4,
        p5,
        p8,
        p8w,
        shannon_bound(&models, &cfg),
        hazard_ordering(&cfg),
        dispersive_ordering(&cfg),
        l1,
        l2,
        oracle_equivalence(&cfg),
    ]
}
