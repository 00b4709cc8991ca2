//! Logistic-map series and the entropy sweep over its control parameter.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{weighted_spacing_sum, SpacingConvention};
use crate::order::FractionalOrder;
use crate::scalar::Real;
use crate::table::format_number;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogisticConfig<T> {
    pub a: T,
    pub x0: T,
    pub length: usize,
    /// Iterations discarded before the first recorded value.
    pub burn_in: usize,
}

impl<T: Real> LogisticConfig<T> {
    pub fn new(a: T, x0: T, length: usize) -> Result<Self> {
        let cfg = Self {
            a,
            x0,
            length,
            burn_in: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= T::zero() && self.a <= T::lit(4.0)) {
            return Err(Error::InvalidConfig(format!(
                "logistic parameter a = {} outside [0, 4]",
                self.a
            )));
        }
        if !(self.x0 >= T::zero() && self.x0 <= T::one()) {
            return Err(Error::InvalidConfig(format!(
                "initial value x0 = {} outside [0, 1]",
                self.x0
            )));
        }
        if self.length < 2 {
            return Err(Error::InvalidConfig(format!(
                "series length must be at least 2, got {}",
                self.length
            )));
        }
        Ok(())
    }
}

/// `x_{t+1} = a x_t (1 - x_t)`, starting from `x0` (which is the first value
/// when `burn_in` is 0). Iterates are clamped to `[0, 1]` against rounding.
///
/// ```
/// use qfcre::chaos::{logistic_series, LogisticConfig};
/// let xs = logistic_series(&LogisticConfig::new(0.0_f64, 0.3, 4).unwrap()).unwrap();
/// assert_eq!(xs, vec![0.3, 0.0, 0.0, 0.0]);
/// ```
pub fn logistic_series<T: Real>(cfg: &LogisticConfig<T>) -> Result<Vec<T>> {
    cfg.validate()?;
    let step = |x: T| (cfg.a * x * (T::one() - x)).max(T::zero()).min(T::one());
    let mut x = cfg.x0;
    for _ in 0..cfg.burn_in {
        x = step(x);
    }
    let mut out = Vec::with_capacity(cfg.length);
    for _ in 0..cfg.length {
        out.push(x);
        x = step(x);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChaosRow<T> {
    pub a: T,
    pub alpha: FractionalOrder<T>,
    pub entropy: T,
}

/// Estimated Q-FCRE of the logistic series for each `a` and each order,
/// sorted by `a` (ties keep input order), then by the order of `alphas`.
pub fn chaos_entropy_sweep<T: Real>(
    a_values: &[T],
    x0: T,
    length: usize,
    burn_in: usize,
    alphas: &[FractionalOrder<T>],
) -> Result<Vec<ChaosRow<T>>> {
    let mut configs = a_values
        .iter()
        .map(|&a| LogisticConfig::new(a, x0, length).map(|c| c.with_burn_in(burn_in)))
        .collect::<Result<Vec<_>>>()?;
    configs.sort_by(|l, r| l.a.partial_cmp(&r.a).expect("validated a"));
    let rows: Vec<Vec<ChaosRow<T>>> = configs
        .par_iter()
        .map(|cfg| {
            let mut xs = logistic_series(cfg).expect("validated config");
            xs.sort_by(|l, r| l.partial_cmp(r).expect("iterates are finite"));
            alphas
                .iter()
                .map(|&alpha| ChaosRow {
                    a: cfg.a,
                    alpha,
                    entropy: weighted_spacing_sum(&xs, alpha.value(), SpacingConvention::Adjacent),
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// `a,alpha,entropy` table.
pub fn sweep_to_csv<T: Real>(rows: &[ChaosRow<T>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["a", "alpha", "entropy"]).expect("in-memory write");
    for r in rows {
        w.write_record([
            format_number(r.a.as_f64()),
            format_number(r.alpha.value().as_f64()),
            format_number(r.entropy.as_f64()),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> FractionalOrder<f64> {
        FractionalOrder::new(0.5).unwrap()
    }

    #[test]
    fn fixed_point_at_two() {
        let xs = logistic_series(&LogisticConfig::new(2.0_f64, 0.1, 200).unwrap()).unwrap();
        assert!(xs[51..].iter().all(|x| (x - 0.5).abs() < 1e-6));
    }

    #[test]
    fn chaotic_regime_spreads() {
        let xs = logistic_series(&LogisticConfig::new(4.0_f64, 0.1, 2000).unwrap()).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!(var > 0.1, "{var}");
        assert!(xs.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn burn_in_skips_iterates() {
        let full = logistic_series(&LogisticConfig::new(3.7_f64, 0.2, 30).unwrap()).unwrap();
        let cut = logistic_series(&LogisticConfig::new(3.7_f64, 0.2, 10).unwrap().with_burn_in(20)).unwrap();
        assert_eq!(&full[20..], &cut[..]);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(LogisticConfig::new(4.5_f64, 0.1, 10).is_err());
        assert!(LogisticConfig::new(3.0_f64, 1.1, 10).is_err());
        assert!(LogisticConfig::new(3.0_f64, 0.1, 1).is_err());
    }

    #[test]
    fn sweep_is_sorted_and_deterministic() {
        let rows = chaos_entropy_sweep(&[4.0, 1.0, 2.5, 4.0], 0.1, 500, 0, &[half()]).unwrap();
        let a: Vec<f64> = rows.iter().map(|r| r.a).collect();
        assert_eq!(a, vec![1.0, 2.5, 4.0, 4.0]);
        assert_eq!(rows[2].entropy, rows[3].entropy);
        assert!(rows[2].entropy > rows[1].entropy);
        let text = sweep_to_csv(&rows);
        assert!(text.starts_with("a,alpha,entropy\n"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn settled_series_has_small_entropy() {
        let rows = chaos_entropy_sweep(&[2.0], 0.1, 2000, 100, &[half()]).unwrap();
        assert!(rows[0].entropy < 0.01, "{}", rows[0].entropy);
    }
}
