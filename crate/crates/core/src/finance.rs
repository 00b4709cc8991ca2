//! Closing prices to log returns, and the per-period entropy of returns.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{weighted_spacing_sum, SpacingConvention};
use crate::order::FractionalOrder;
use crate::table::format_number;

/// Layout of a price file.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvSpec {
    pub date_column: String,
    pub close_column: String,
    /// `chrono` format string for the date column.
    pub date_format: String,
    pub delimiter: u8,
}

impl Default for CsvSpec {
    fn default() -> Self {
        Self {
            date_column: "Date".into(),
            close_column: "Close".into(),
            date_format: "%Y-%m-%d".into(),
            delimiter: b',',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PriceSeries {
    pub dates: Vec<NaiveDate>,
    pub prices: Vec<f64>,
}

pub fn load_prices(path: impl AsRef<Path>, spec: &CsvSpec) -> Result<PriceSeries> {
    let file =
        std::fs::File::open(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_prices(file, spec)
}

/// Parse prices from any reader. Rows in errors are 1-based file line
/// numbers, so the header is line 1.
pub fn read_prices<R: Read>(reader: R, spec: &CsvSpec) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            row: 1,
            message: format!("missing column `{name}`"),
        })
    };
    let (date_idx, close_idx) = (column(&spec.date_column)?, column(&spec.close_column)?);

    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let date_text = record.get(date_idx).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_text, &spec.date_format).map_err(|e| Error::Parse {
            row: line,
            message: format!("date `{date_text}`: {e}"),
        })?;
        let close_text = record.get(close_idx).unwrap_or("");
        if close_text.is_empty() {
            return Err(Error::Parse {
                row: line,
                message: "missing price".into(),
            });
        }
        let price: f64 = close_text.parse().map_err(|_| Error::Parse {
            row: line,
            message: format!("price `{close_text}` is not a number"),
        })?;
        if !(price > 0.0) || !price.is_finite() {
            return Err(Error::NonPositivePrice {
                row: line,
                value: price,
            });
        }
        rows.push((date, price, line));
    }
    rows.sort_by_key(|r| r.0);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDate {
            row: w[0].2.max(w[1].2),
            date: w[1].0.to_string(),
        });
    }
    Ok(PriceSeries {
        dates: rows.iter().map(|r| r.0).collect(),
        prices: rows.iter().map(|r| r.1).collect(),
    })
}

/// Log returns and their shift by the global minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnSeries {
    /// Date of each return: the later of the two closes it spans.
    pub dates: Vec<NaiveDate>,
    pub prices: Vec<f64>,
    pub log_returns: Vec<f64>,
    /// `r_t - min_s r_s`; the minimum is taken over the whole series.
    pub shifted_returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn from_prices(series: &PriceSeries) -> Result<Self> {
        let PriceSeries { dates, prices } = series;
        if prices.len() < 2 {
            return Err(Error::SampleTooSmall(prices.len()));
        }
        if dates.len() != prices.len() {
            return Err(Error::InvalidConfig("dates and prices differ in length".into()));
        }
        if let Some(i) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(format!(
                "dates are not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(&p) = prices.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
            return Err(Error::NonPositivePrice { row: 0, value: p });
        }
        let log_returns: Vec<f64> = prices.windows(2).map(|w| w[1].ln() - w[0].ln()).collect();
        let min = log_returns.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            dates: dates[1..].to_vec(),
            prices: prices.clone(),
            shifted_returns: log_returns.iter().map(|r| r - min).collect(),
            log_returns,
        })
    }

    pub fn len(&self) -> usize {
        self.log_returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_returns.is_empty()
    }

    /// `date,log_return,shifted_return` table.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["date", "log_return", "shifted_return"])
            .expect("in-memory write");
        for i in 0..self.len() {
            w.write_record([
                self.dates[i].to_string(),
                format_number(self.log_returns[i]),
                format_number(self.shifted_returns[i]),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// How returns are grouped into periods.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Partition {
    /// One period per calendar year of the return date.
    Yearly,
    /// Sliding windows of `length` returns advanced by `step`.
    Window { length: usize, step: usize },
}

impl FromStr for Partition {
    type Err = Error;

    /// `yearly` or `window:LENGTH,STEP`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("partition `{s}`: expected `yearly` or `window:N,K`"));
        if s == "yearly" {
            return Ok(Self::Yearly);
        }
        let body = s.strip_prefix("window:").ok_or_else(bad)?;
        let (length, step) = body.split_once(',').ok_or_else(bad)?;
        let length: usize = length.trim().parse().map_err(|_| bad())?;
        let step: usize = step.trim().parse().map_err(|_| bad())?;
        if length < 2 || step < 1 {
            return Err(Error::InvalidConfig(format!(
                "window length must be at least 2 and step at least 1, got {length},{step}"
            )));
        }
        Ok(Self::Window { length, step })
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Yearly => f.write_str("yearly"),
            Self::Window { length, step } => write!(f, "window:{length},{step}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodRow {
    /// The year, or `first/last` return dates of a window.
    pub period: String,
    pub alpha: FractionalOrder<f64>,
    pub entropy: f64,
}

/// Estimated Q-FCRE of the shifted returns in each period, for every order.
/// Periods with fewer than two returns are skipped with a warning.
pub fn period_entropy(
    series: &ReturnSeries,
    partition: Partition,
    alphas: &[FractionalOrder<f64>],
) -> Result<Vec<PeriodRow>> {
    let periods: Vec<(String, Vec<f64>)> = match partition {
        Partition::Yearly => {
            let mut by_year: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
            for (d, y) in series.dates.iter().zip(&series.shifted_returns) {
                by_year.entry(d.year()).or_default().push(*y);
            }
            by_year.into_iter().map(|(y, v)| (y.to_string(), v)).collect()
        }
        Partition::Window { length, step } => {
            if length < 2 || step < 1 {
                return Err(Error::InvalidConfig(
                    "window length must be at least 2 and step at least 1".into(),
                ));
            }
            if series.len() < length {
                return Err(Error::InvalidConfig(format!(
                    "window {length} is longer than the series ({})",
                    series.len()
                )));
            }
            (0..=series.len() - length)
                .step_by(step)
                .map(|s| {
                    let label = format!("{}/{}", series.dates[s], series.dates[s + length - 1]);
                    (label, series.shifted_returns[s..s + length].to_vec())
                })
                .collect()
        }
    };

    let kept: Vec<(String, Vec<f64>)> = periods
        .into_iter()
        .filter(|(label, v)| {
            if v.len() < 2 {
                log::warn!("period {label} has {} return(s); skipped", v.len());
                false
            } else {
                true
            }
        })
        .collect();
    let rows: Vec<Vec<PeriodRow>> = kept
        .par_iter()
        .map(|(label, values)| {
            let mut sorted = values.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite returns"));
            alphas
                .iter()
                .map(|&alpha| PeriodRow {
                    period: label.clone(),
                    alpha,
                    entropy: weighted_spacing_sum(&sorted, alpha.value(), SpacingConvention::Adjacent),
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// `period,alpha,entropy` table.
pub fn periods_to_csv(rows: &[PeriodRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["period", "alpha", "entropy"]).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.period.clone(),
            format_number(r.alpha.value()),
            format_number(r.entropy),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
