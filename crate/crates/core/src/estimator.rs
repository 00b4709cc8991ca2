//! Nonparametric estimation from order-statistic spacings.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::order::FractionalOrder;
use crate::scalar::{pow0, Real};

/// Order statistics of a nonnegative sample with at least two points.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleData<T> {
    values: Vec<T>,
}

fn check_values<T: Real>(values: &[T]) -> Result<()> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteObservation(i));
    }
    if let Some(i) = values.iter().position(|v| *v < T::zero()) {
        return Err(Error::NegativeObservation {
            index: i,
            value: values[i].as_f64(),
        });
    }
    if values.len() < 2 {
        return Err(Error::SampleTooSmall(values.len()));
    }
    Ok(())
}

impl<T: Real> SampleData<T> {
    /// Sort (stably) and validate raw observations.
    pub fn from_unsorted(mut values: Vec<T>) -> Result<Self> {
        check_values(&values)?;
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
        Ok(Self { values })
    }

    /// Validate observations that are already in nondecreasing order.
    pub fn from_sorted(values: Vec<T>) -> Result<Self> {
        check_values(&values)?;
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::UnsortedSample(i + 1));
        }
        Ok(Self { values })
    }

    /// One value per line; blank lines and lines starting with `#` are skipped.
    /// Error rows are 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let x: f64 = line.parse().map_err(|_| Error::Parse {
                row: i + 1,
                message: format!("`{line}` is not a number"),
            })?;
            values.push(T::lit(x));
        }
        Self::from_unsorted(values)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: a sample holds at least two points.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Which order-statistic differences the weighted spacing sum pairs with
/// the weight at level `i/n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SpacingConvention {
    /// `X_{i+1:n} - X_{i:n}`: depends on spacings only, so the estimate is
    /// shift invariant.
    #[default]
    Adjacent,
    /// `X_{i:n} - X_{i-1:n}` with `X_{0:n} = 0`, the index range as the
    /// estimator is usually printed. Not shift invariant: the first term
    /// carries `X_{1:n}` itself.
    OriginAnchored,
}

impl std::str::FromStr for SpacingConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjacent" => Ok(Self::Adjacent),
            "origin" | "origin-anchored" => Ok(Self::OriginAnchored),
            other => Err(Error::InvalidConfig(format!(
                "unknown spacing convention `{other}` (expected adjacent or origin)"
            ))),
        }
    }
}

impl std::fmt::Display for SpacingConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Adjacent => "adjacent",
            Self::OriginAnchored => "origin",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyEstimate<T> {
    pub value: T,
    pub alpha: FractionalOrder<T>,
    pub n: usize,
}

/// Piecewise-constant quantile density `n (X_{k:n} - X_{k-1:n})` on
/// `((k-1)/n, k/n)`; zero on the first panel, which has no left neighbour.
pub fn empirical_qdf<T: Real>(sample: &SampleData<T>, u: T) -> Result<T> {
    if !(u > T::zero() && u < T::one()) {
        return Err(Error::ProbabilityOutOfRange(u.as_f64()));
    }
    let x = sample.values();
    let n = x.len();
    let k = (u * T::from_count(n)).floor().to_usize().unwrap_or(0).min(n - 1) + 1;
    if k == 1 {
        return Ok(T::zero());
    }
    Ok(T::from_count(n) * (x[k - 1] - x[k - 2]))
}

/// `(1 - p)(-log(1 - p))^alpha` at `p = i/n`.
#[inline]
fn level_weight<T: Real>(i: usize, n: usize, alpha: T) -> T {
    let p = T::from_count(i) / T::from_count(n);
    let survival = T::from_count(n - i) / T::from_count(n);
    survival * pow0(-(-p).ln_1p(), alpha)
}

/// The weighted spacing sum on an already sorted slice. No validation.
pub fn weighted_spacing_sum<T: Real>(sorted: &[T], alpha: T, convention: SpacingConvention) -> T {
    let n = sorted.len();
    if n < 2 {
        return T::zero();
    }
    (1..n)
        .map(|i| {
            let spacing = match convention {
                SpacingConvention::Adjacent => sorted[i] - sorted[i - 1],
                SpacingConvention::OriginAnchored => sorted[i - 1] - if i >= 2 { sorted[i - 2] } else { T::zero() },
            };
            level_weight(i, n, alpha) * spacing
        })
        .sum()
}

/// `sum_{i=1}^{n-1} (1 - i/n)(-log(1 - i/n))^alpha (X_{i+1:n} - X_{i:n})`.
///
/// ```
/// use qfcre::{estimator::{estimate_qfcre, SampleData}, FractionalOrder};
/// let s = SampleData::from_unsorted(vec![3.0, 1.0]).unwrap();
/// let e = estimate_qfcre(&s, FractionalOrder::one());
/// assert!((e.value - 2f64.ln()).abs() < 1e-15);
/// ```
pub fn estimate_qfcre<T: Real>(sample: &SampleData<T>, alpha: FractionalOrder<T>) -> EntropyEstimate<T> {
    estimate_qfcre_with(sample, alpha, SpacingConvention::Adjacent)
}

pub fn estimate_qfcre_with<T: Real>(
    sample: &SampleData<T>,
    alpha: FractionalOrder<T>,
    convention: SpacingConvention,
) -> EntropyEstimate<T> {
    EntropyEstimate {
        value: weighted_spacing_sum(sample.values(), alpha.value(), convention),
        alpha,
        n: sample.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowEstimate<T> {
    pub start: usize,
    pub alpha: FractionalOrder<T>,
    pub value: T,
}

/// Estimates over sliding windows of `series`, ordered by window start and
/// then by the order of `alphas`. Windows are evaluated in parallel.
pub fn estimate_qfcre_windowed<T: Real>(
    series: &[T],
    window: usize,
    step: usize,
    alphas: &[FractionalOrder<T>],
    convention: SpacingConvention,
) -> Result<Vec<WindowEstimate<T>>> {
    if window < 2 {
        return Err(Error::InvalidConfig(format!("window must be at least 2, got {window}")));
    }
    if step < 1 {
        return Err(Error::InvalidConfig("step must be at least 1".into()));
    }
    if series.len() < window {
        return Err(Error::InvalidConfig(format!(
            "window {window} is longer than the series ({})",
            series.len()
        )));
    }
    check_values(series)?;
    let starts: Vec<usize> = (0..=series.len() - window).step_by(step).collect();
    let rows: Vec<Vec<WindowEstimate<T>>> = starts
        .par_iter()
        .map(|&start| {
            let mut sorted = series[start..start + window].to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
            alphas
                .iter()
                .map(|&alpha| WindowEstimate {
                    start,
                    alpha,
                    value: weighted_spacing_sum(&sorted, alpha.value(), convention),
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(a: f64) -> FractionalOrder<f64> {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn validation() {
        assert!(matches!(
            SampleData::from_unsorted(vec![1.0]),
            Err(Error::SampleTooSmall(1))
        ));
        assert!(matches!(
            SampleData::from_unsorted(vec![1.0, -2.0]),
            Err(Error::NegativeObservation { index: 1, .. })
        ));
        assert!(matches!(
            SampleData::from_unsorted(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteObservation(1))
        ));
        assert!(matches!(
            SampleData::from_sorted(vec![1.0, 3.0, 2.0]),
            Err(Error::UnsortedSample(2))
        ));
        assert_eq!(
            SampleData::from_unsorted(vec![3.0, 1.0, 2.0]).unwrap().values(),
            &[1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn parse_text() {
        let s = SampleData::<f64>::parse("# header\n3.5\n\n1.25\n").unwrap();
        assert_eq!(s.values(), &[1.25, 3.5]);
        assert!(matches!(
            SampleData::<f64>::parse("1\nx\n"),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            SampleData::<f64>::parse("1,5\n2\n"),
            Err(Error::Parse { row: 1, .. })
        ));
    }

    #[test]
    fn empirical_qdf_examples() {
        let s = SampleData::from_unsorted(vec![1.0, 3.0]).unwrap();
        assert_eq!(empirical_qdf(&s, 0.75).unwrap(), 4.0);
        assert_eq!(empirical_qdf(&s, 0.25).unwrap(), 0.0);
        assert!(empirical_qdf(&s, 0.0).is_err());
        assert!(empirical_qdf(&s, 1.0).is_err());
        let c = SampleData::from_unsorted(vec![2.0; 5]).unwrap();
        assert_eq!(empirical_qdf(&c, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn empirical_qdf_telescopes() {
        let s = SampleData::from_unsorted(vec![0.3, 1.7, 0.9, 4.2, 2.2, 0.1]).unwrap();
        let n = s.len();
        // Integrate the step function panel by panel at the panel midpoints.
        let total: f64 = (2..=n)
            .map(|k| empirical_qdf(&s, (k as f64 - 0.5) / n as f64).unwrap() / n as f64)
            .sum();
        assert!((total - (4.2 - 0.1)).abs() < 1e-10);
    }

    #[test]
    fn hand_examples() {
        let s = SampleData::from_unsorted(vec![1.0, 3.0]).unwrap();
        assert!((estimate_qfcre(&s, order(1.0)).value - 2f64.ln()).abs() < 1e-15);
        // Origin anchored: the single term pairs w(1/2) with X_1 - 0 = 1.
        let o = estimate_qfcre_with(&s, order(1.0), SpacingConvention::OriginAnchored).value;
        assert!((o - 0.5 * 2f64.ln()).abs() < 1e-15);
        let c = SampleData::from_unsorted(vec![4.0; 10]).unwrap();
        assert_eq!(estimate_qfcre(&c, order(0.3)).value, 0.0);
    }

    #[test]
    fn windowed() {
        let series: Vec<f64> = (0..10).map(|i| ((i * 7) % 10) as f64 * 0.5).collect();
        let alphas = [order(0.5)];
        let rows = estimate_qfcre_windowed(&series, 10, 1, &alphas, SpacingConvention::Adjacent).unwrap();
        assert_eq!(rows.len(), 1);
        let whole = estimate_qfcre(&SampleData::from_unsorted(series.clone()).unwrap(), order(0.5)).value;
        assert_eq!(rows[0].value, whole);

        let flat = vec![1.0; 50];
        let rows = estimate_qfcre_windowed(&flat, 10, 3, &alphas, SpacingConvention::Adjacent).unwrap();
        assert!(rows.iter().all(|r| r.value == 0.0));
        assert!(rows.windows(2).all(|w| w[0].start < w[1].start));

        assert!(estimate_qfcre_windowed(&flat, 60, 1, &alphas, SpacingConvention::Adjacent).is_err());
        assert!(estimate_qfcre_windowed(&flat, 1, 1, &alphas, SpacingConvention::Adjacent).is_err());
        assert!(estimate_qfcre_windowed(&flat, 5, 0, &alphas, SpacingConvention::Adjacent).is_err());
    }

    #[test]
    fn convention_parsing() {
        assert_eq!(
            "adjacent".parse::<SpacingConvention>().unwrap(),
            SpacingConvention::Adjacent
        );
        assert_eq!(
            "origin".parse::<SpacingConvention>().unwrap(),
            SpacingConvention::OriginAnchored
        );
        assert!("left".parse::<SpacingConvention>().is_err());
    }
}
