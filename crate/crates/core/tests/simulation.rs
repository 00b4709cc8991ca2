//! Statistical behaviour of the Monte-Carlo study.

use qfcre::simulation::{bias_mse_study, StudyConfig};
use qfcre::{make_builtin, Order, SpacingConvention};

fn config(n_list: Vec<usize>) -> StudyConfig<f64> {
    StudyConfig {
        n_list,
        replications: 1000,
        seed: 99,
        ..StudyConfig::default()
    }
}

#[test]
fn power_pareto_quality_improves_and_bias_is_negative() {
    let m = make_builtin("power_pareto", &[("C", 1.5), ("l1", 2.0), ("l2", 0.25)]).unwrap();
    let r = bias_mse_study(&m, Order::new(0.25).unwrap(), &config(vec![50, 100, 250, 500, 1000])).unwrap();
    for w in r.rows.windows(2) {
        assert!(w[1].bias.abs() <= w[0].bias.abs(), "{:?}", r.rows);
        assert!(w[1].mse <= w[0].mse, "{:?}", r.rows);
    }
    assert!(r.rows.iter().all(|row| row.bias < 0.0));
}

#[test]
fn govindarajulu_quality_improves_and_bias_is_positive() {
    let m = make_builtin("govindarajulu", &[("theta", 1.0), ("sigma", 2.0), ("beta", 2.0)]).unwrap();
    let r = bias_mse_study(&m, Order::new(0.75).unwrap(), &config(vec![75, 100, 250, 500, 1000])).unwrap();
    for w in r.rows.windows(2) {
        assert!(w[1].bias.abs() <= w[0].bias.abs(), "{:?}", r.rows);
        assert!(w[1].mse <= w[0].mse, "{:?}", r.rows);
    }
    assert!(r.rows.iter().all(|row| row.bias > 0.0));
}

#[test]
fn reports_are_reproducible() {
    let m = make_builtin("exponential", &[("lambda", 1.0)]).unwrap();
    let cfg = StudyConfig {
        replications: 300,
        convention: SpacingConvention::Adjacent,
        ..config(vec![30, 60])
    };
    let a = bias_mse_study(&m, Order::one(), &cfg).unwrap();
    let b = bias_mse_study(&m, Order::one(), &cfg).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn adjacent_estimator_is_consistent_for_exponential() {
    let m = make_builtin("exponential", &[("lambda", 1.0)]).unwrap();
    let s = qfcre::simulation::sample_model(&m, 10_000, 2024).unwrap();
    let e = qfcre::estimator::estimate_qfcre(&s, Order::one()).value;
    assert!((e - 1.0).abs() < 0.05, "{e}");
}
