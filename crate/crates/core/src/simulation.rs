//! Inverse-transform sampling and the Monte-Carlo bias/MSE protocol.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entropy::{qfcre, Method};
use crate::error::{Error, Result};
use crate::estimator::{weighted_spacing_sum, SampleData, SpacingConvention};
use crate::model::QuantileModel;
use crate::order::FractionalOrder;
use crate::prob::Prob;
use crate::quadrature::QuadratureConfig;
use crate::scalar::Real;
use crate::table::format_number;

fn draw<T: Real>(model: &QuantileModel<T>, n: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.sample(Open01);
            model.quantile_at(Prob::new(T::lit(u)))
        })
        .collect()
}

/// `n` inverse-transform draws `Q(U)` from a seeded ChaCha8 stream.
///
/// ```
/// use qfcre::{make_builtin, simulation::sample_model};
/// let m = make_builtin("uniform", &[("b", 1.0_f64)]).unwrap();
/// assert_eq!(sample_model(&m, 100, 3).unwrap(), sample_model(&m, 100, 3).unwrap());
/// ```
pub fn sample_model<T: Real>(model: &QuantileModel<T>, n: usize, seed: u64) -> Result<SampleData<T>> {
    if n < 2 {
        return Err(Error::SampleTooSmall(n));
    }
    SampleData::from_unsorted(draw(model, n, seed))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one replication, a hash of `(master, n, replication)`. Each run
/// gets its own stream regardless of how replications are scheduled.
pub fn replication_seed(master: u64, n: usize, replication: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ n as u64) ^ replication as u64)
}

/// Pairwise (cascade) summation; the result depends only on the order of `xs`.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig<T> {
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub convention: SpacingConvention,
    /// Settings for the true-value integral; closed forms are only used as a cross-check.
    pub quadrature: QuadratureConfig<T>,
}

impl<T: Real> Default for StudyConfig<T> {
    /// Sample sizes 50 to 1000, 5000 replications, and the origin-anchored
    /// spacing convention that matches the reference bias/MSE values.
    fn default() -> Self {
        Self {
            n_list: vec![50, 100, 250, 500, 1000],
            replications: 5000,
            seed: 20_240_101,
            convention: SpacingConvention::OriginAnchored,
            quadrature: QuadratureConfig::forced(),
        }
    }
}

impl<T: Real> StudyConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::InvalidConfig("n list is empty".into()));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(Error::SampleTooSmall(n));
        }
        if self.replications < 100 {
            return Err(Error::InvalidConfig(format!(
                "at least 100 replications are required, got {}",
                self.replications
            )));
        }
        self.quadrature.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyRow<T> {
    pub n: usize,
    pub mean_estimate: T,
    pub bias: T,
    pub mse: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport<T> {
    pub model: String,
    pub alpha: FractionalOrder<T>,
    pub true_value: T,
    pub true_method: Method,
    pub rows: Vec<StudyRow<T>>,
    pub replications: usize,
    pub seed: u64,
    pub convention: SpacingConvention,
}

/// Monte-Carlo mean, bias and MSE of the estimator at each sample size.
///
/// The true value always comes from quadrature; a closed form, when the model
/// has one, must agree to `max(1e-6, 100 rel_tol)` or the study aborts.
pub fn bias_mse_study<T: Real>(
    model: &QuantileModel<T>,
    alpha: FractionalOrder<T>,
    cfg: &StudyConfig<T>,
) -> Result<SimulationReport<T>> {
    cfg.validate()?;
    let forced = QuadratureConfig {
        use_closed_form: false,
        ..cfg.quadrature
    };
    let true_value = qfcre(model, alpha, &forced)?.value;
    if let Some(closed) = model.closed_form_qfcre(alpha) {
        let tol = T::lit(1e-6).max(T::lit(100.0) * forced.rel_tol);
        if (closed - true_value).abs() > tol * closed.abs().max(T::one()) {
            return Err(Error::ClosedFormMismatch {
                closed: closed.as_f64(),
                quadrature: true_value.as_f64(),
            });
        }
    }

    let mut n_list = cfg.n_list.clone();
    n_list.sort_unstable();
    let r = T::from_count(cfg.replications);
    let rows = n_list
        .iter()
        .map(|&n| {
            let estimates: Vec<T> = (0..cfg.replications)
                .into_par_iter()
                .map(|rep| {
                    let mut xs = draw(model, n, replication_seed(cfg.seed, n, rep));
                    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
                    weighted_spacing_sum(&xs, alpha.value(), cfg.convention)
                })
                .collect();
            if let Some(bad) = estimates.iter().position(|e| !e.is_finite()) {
                return Err(Error::Divergence {
                    what: format!("estimate at n = {n}, replication {bad}"),
                    partial: estimates[bad].as_f64(),
                    error: f64::NAN,
                });
            }
            let mean_estimate = pairwise_sum(&estimates) / r;
            let squared: Vec<T> = estimates.iter().map(|&e| (e - true_value) * (e - true_value)).collect();
            Ok(StudyRow {
                n,
                mean_estimate,
                bias: mean_estimate - true_value,
                mse: pairwise_sum(&squared) / r,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SimulationReport {
        model: model.label().to_string(),
        alpha,
        true_value,
        true_method: Method::Quadrature,
        rows,
        replications: cfg.replications,
        seed: cfg.seed,
        convention: cfg.convention,
    })
}

pub const REPORT_HEADER: [&str; 4] = ["n", "mean_estimate", "bias", "mse"];

impl<T: Real> SimulationReport<T> {
    /// `#`-comment metadata lines followed by `n,mean_estimate,bias,mse`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# model: {}\n", self.model));
        out.push_str(&format!("# alpha: {}\n", self.alpha));
        out.push_str(&format!(
            "# true_value: {} ({})\n",
            format_number(self.true_value.as_f64()),
            self.true_method
        ));
        out.push_str(&format!("# replications: {}\n", self.replications));
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(&format!("# convention: {}\n", self.convention));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(REPORT_HEADER).expect("in-memory write");
        for row in &self.rows {
            w.write_record([
                row.n.to_string(),
                format_number(row.mean_estimate.as_f64()),
                format_number(row.bias.as_f64()),
                format_number(row.mse.as_f64()),
            ])
            .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv"));
        out
    }
}

/// Read back the rows of a report emitted by [`SimulationReport::to_csv`].
pub fn parse_report_rows(text: &str) -> Result<Vec<StudyRow<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse {
        row: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(REPORT_HEADER) {
        return Err(Error::Parse {
            row: 1,
            message: format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| -> Result<f64> {
            record[i].parse().map_err(|_| Error::Parse {
                row: line,
                message: format!("`{}` is not a number", &record[i]),
            })
        };
        rows.push(StudyRow {
            n: record[0].parse().map_err(|_| Error::Parse {
                row: line,
                message: format!("`{}` is not a sample size", &record[0]),
            })?,
            mean_estimate: field(1)?,
            bias: field(2)?,
            mse: field(3)?,
        });
    }
    Ok(rows)
}
