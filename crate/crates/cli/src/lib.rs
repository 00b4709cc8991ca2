//! Command-line front end: argument parsing and the subcommand drivers.
//!
//! [`run`] is the whole program minus process setup, so tests can drive it
//! in-process. Output is assembled in memory and written only on success.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qfcre::chaos::{chaos_entropy_sweep, sweep_to_csv};
use qfcre::entropy::{qdfcre_profile, qfcre};
use qfcre::estimator::{estimate_qfcre_windowed, estimate_qfcre_with};
use qfcre::finance::{load_prices, period_entropy, periods_to_csv, CsvSpec, Partition, ReturnSeries};
use qfcre::simulation::{bias_mse_study, StudyConfig};
use qfcre::table::format_number;
use qfcre::verify::property_suite;
use qfcre::{Config, Model, ModelSpec, Order, Sample, SpacingConvention};

pub const THREADS_ENV: &str = "QFCRE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "qfcre",
    version,
    about = "Fractional cumulative residual entropy of quantile models and samples"
)]
struct Cli {
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (default: QFCRE_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy of a built-in model by closed form or quadrature.
    Entropy(EntropyArgs),
    /// Spacing estimator on a sample file (one value per line).
    Estimate(EstimateArgs),
    /// Monte-Carlo bias and MSE of the estimator.
    Simulate(SimulateArgs),
    /// Estimator on logistic-map orbits.
    Chaos(ChaosArgs),
    /// Per-period entropy of shifted log returns from a price CSV.
    Finance(FinanceArgs),
    /// Property checks over the built-in catalog.
    Verify,
}

#[derive(Debug, Args)]
struct EntropyArgs {
    /// Model spec, e.g. `exponential(lambda=1)`.
    #[arg(long)]
    model: String,
    /// Orders: `a,b,...` or `start:stop:count`.
    #[arg(long)]
    alpha: String,
    /// Dynamic entropy over a grid of levels.
    #[arg(long)]
    dynamic: bool,
    /// Levels in [0, 1) for --dynamic: `a,b,...` or `start:stop:count`.
    #[arg(long, default_value = "0:0.9:10", requires = "dynamic")]
    u_grid: String,
    /// Integrate even when a closed form is known.
    #[arg(long)]
    quadrature: bool,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    alpha: String,
    /// Sliding-window length; estimates every window instead of the whole sample.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = 1, requires = "window")]
    step: usize,
    /// `adjacent` or `origin`.
    #[arg(long, default_value = "adjacent")]
    convention: String,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    alpha: f64,
    /// Sample sizes, comma-separated.
    #[arg(long, default_value = "50,100,250,500,1000")]
    n: String,
    #[arg(long, default_value_t = 5000)]
    reps: usize,
    #[arg(long, default_value_t = 20_240_101)]
    seed: u64,
    /// `origin` (matches the reference bias/MSE values) or `adjacent`.
    #[arg(long, default_value = "origin")]
    convention: String,
}

#[derive(Debug, Args)]
struct ChaosArgs {
    /// Map parameters, comma-separated or `start:stop:count`.
    #[arg(long)]
    a: String,
    #[arg(long, default_value_t = 0.1)]
    x0: f64,
    #[arg(long, default_value_t = 2000)]
    length: usize,
    #[arg(long)]
    alpha: String,
    /// Iterates discarded before the recorded orbit.
    #[arg(long, default_value_t = 0)]
    burn_in: usize,
}

#[derive(Debug, Args)]
struct FinanceArgs {
    #[arg(long)]
    input: PathBuf,
    /// `yearly` or `window:LENGTH,STEP`.
    #[arg(long, default_value = "yearly")]
    partition: String,
    #[arg(long, required_unless_present = "returns")]
    alpha: Option<String>,
    /// Emit the return series instead of the entropy table.
    #[arg(long)]
    returns: bool,
    #[arg(long, default_value = "Date")]
    date_column: String,
    #[arg(long, default_value = "Close")]
    close_column: String,
    #[arg(long, default_value = "%Y-%m-%d")]
    date_format: String,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(qfcre::Error),
    /// The command ran but its verdict is negative; output is still emitted.
    Verdict(String),
}

impl From<qfcre::Error> for Failure {
    fn from(e: qfcre::Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Run the program on `args` (program name first). Returns the exit status:
/// 0 success, 1 invalid input or a failed verification, 2 numerical failure.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "{first}");
            return 1;
        }
    };

    let result = threads(cli.threads).and_then(|n| match n {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Usage(e.to_string()))?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    });

    let (text, status) = match result {
        Ok(text) => (text, 0),
        Err(Failure::Verdict(text)) => {
            let _ = writeln!(err, "verification failed: see FAIL lines");
            (text, 1)
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 1;
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            return if e.is_numerical() { 2 } else { 1 };
        }
    };

    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => status,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn threads(flag: Option<usize>) -> Outcome<Option<usize>> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("{THREADS_ENV}=`{v}` is not a thread count")))?,
            ),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(Failure::Usage("thread count must be at least 1".into()));
    }
    Ok(n)
}

fn dispatch(command: &Command) -> Outcome<String> {
    match command {
        Command::Entropy(a) => entropy(a),
        Command::Estimate(a) => estimate(a),
        Command::Simulate(a) => simulate(a),
        Command::Chaos(a) => chaos(a),
        Command::Finance(a) => finance(a),
        Command::Verify => verify(),
    }
}

/// `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_list(text: &str, what: &str) -> std::result::Result<Vec<f64>, String> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("{what}: `{}` is not a number", s.trim()))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let (start, stop) = (number(start)?, number(stop)?);
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| format!("{what}: `{}` is not a count", count.trim()))?;
            match count {
                0 => Err(format!("{what}: count must be at least 1")),
                1 => Ok(vec![start]),
                _ => {
                    let step = (stop - start) / (count - 1) as f64;
                    Ok((0..count)
                        .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
                        .collect())
                }
            }
        }
        [single] => single.split(',').map(number).collect(),
        _ => Err(format!(
            "{what}: expected `a,b,...` or `start:stop:count`, got `{text}`"
        )),
    }
}

fn list(text: &str, what: &str) -> Outcome<Vec<f64>> {
    parse_list(text, what).map_err(Failure::Usage)
}

fn orders(text: &str) -> Outcome<Vec<Order>> {
    Ok(list(text, "alpha")?
        .into_iter()
        .map(Order::new)
        .collect::<qfcre::Result<_>>()?)
}

fn model(spec: &str) -> Outcome<Model> {
    Ok(spec.parse::<ModelSpec>()?.build()?)
}

fn convention(text: &str) -> Outcome<SpacingConvention> {
    Ok(text.parse()?)
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn entropy(args: &EntropyArgs) -> Outcome<String> {
    let m = model(&args.model)?;
    let alphas = orders(&args.alpha)?;
    let cfg = if args.quadrature {
        Config::forced()
    } else {
        Config::default()
    };
    if !args.dynamic {
        let rows = alphas
            .iter()
            .map(|&a| {
                qfcre(&m, a, &cfg).map(|e| {
                    vec![
                        a.to_string(),
                        format_number(e.value),
                        e.method.to_string(),
                        format_number(e.est_error),
                    ]
                })
            })
            .collect::<qfcre::Result<Vec<_>>>()?;
        return Ok(csv_table(&["alpha", "value", "method", "est_error"], rows));
    }
    let grid = list(&args.u_grid, "u-grid")?;
    let mut rows = Vec::new();
    for &a in &alphas {
        let profile = qdfcre_profile(&m, a, &grid, &cfg)?;
        for (u, e) in &profile.points {
            rows.push(vec![
                a.to_string(),
                u.to_string(),
                format_number(e.value),
                e.method.to_string(),
                format_number(e.est_error),
                profile.trend.to_string(),
            ]);
        }
    }
    Ok(csv_table(
        &["alpha", "u", "value", "method", "est_error", "trend"],
        rows,
    ))
}

fn estimate(args: &EstimateArgs) -> Outcome<String> {
    let text =
        std::fs::read_to_string(&args.input).map_err(|e| Failure::Usage(format!("{}: {e}", args.input.display())))?;
    let alphas = orders(&args.alpha)?;
    let conv = convention(&args.convention)?;
    match args.window {
        None => {
            let sample = Sample::parse(&text)?;
            let rows = alphas.iter().map(|&a| {
                let e = estimate_qfcre_with(&sample, a, conv);
                vec![a.to_string(), e.n.to_string(), format_number(e.value)]
            });
            Ok(csv_table(&["alpha", "n", "estimate"], rows))
        }
        Some(window) => {
            // Keep the series in file order: windows run along it.
            let series = series_in_order(&text)?;
            let rows = estimate_qfcre_windowed(&series, window, args.step, &alphas, conv)?
                .into_iter()
                .map(|w| vec![w.start.to_string(), w.alpha.to_string(), format_number(w.value)]);
            Ok(csv_table(&["start", "alpha", "estimate"], rows))
        }
    }
}

fn series_in_order(text: &str) -> Outcome<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        values.push(line.parse().map_err(|_| qfcre::Error::Parse {
            row: i + 1,
            message: format!("`{line}` is not a number"),
        })?);
    }
    Ok(values)
}

fn simulate(args: &SimulateArgs) -> Outcome<String> {
    let m = model(&args.model)?;
    let alpha = Order::new(args.alpha)?;
    let n_list = args
        .n
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("n: `{}` is not a sample size", s.trim())))
        })
        .collect::<Outcome<Vec<_>>>()?;
    let cfg = StudyConfig {
        n_list,
        replications: args.reps,
        seed: args.seed,
        convention: convention(&args.convention)?,
        ..StudyConfig::default()
    };
    Ok(bias_mse_study(&m, alpha, &cfg)?.to_csv())
}

fn chaos(args: &ChaosArgs) -> Outcome<String> {
    let a_values = list(&args.a, "a")?;
    let alphas = orders(&args.alpha)?;
    let rows = chaos_entropy_sweep(&a_values, args.x0, args.length, args.burn_in, &alphas)?;
    Ok(sweep_to_csv(&rows))
}

fn finance(args: &FinanceArgs) -> Outcome<String> {
    let spec = CsvSpec {
        date_column: args.date_column.clone(),
        close_column: args.close_column.clone(),
        date_format: args.date_format.clone(),
        ..CsvSpec::default()
    };
    let prices = load_prices(&args.input, &spec)?;
    let series = ReturnSeries::from_prices(&prices)?;
    if args.returns {
        return Ok(series.to_csv());
    }
    let partition: Partition = args.partition.parse()?;
    let alphas = orders(args.alpha.as_deref().unwrap_or_default())?;
    Ok(periods_to_csv(&period_entropy(&series, partition, &alphas)?))
}

fn verify() -> Outcome<String> {
    let checks = property_suite(&Config::default());
    let mut text = String::new();
    for c in &checks {
        writeln!(text, "{c}").expect("string write");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(text, "{} of {} checks passed", checks.len() - failed, checks.len()).expect("string write");
    if failed == 0 {
        Ok(text)
    } else {
        Err(Failure::Verdict(text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("0.1, 0.5,1", "alpha").unwrap(), vec![0.1, 0.5, 1.0]);
        assert_eq!(parse_list("0:1:5", "alpha").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_list("0.3:0.9:1", "alpha").unwrap(), vec![0.3]);
        assert!(parse_list("0:1:0", "alpha").is_err());
        assert!(parse_list("0:1", "alpha").is_err());
        assert!(parse_list("0.1,x", "alpha").unwrap_err().contains("`x`"));
    }

    #[test]
    fn range_ends_exactly_at_stop() {
        assert_eq!(*parse_list("0.1:1:10", "alpha").unwrap().last().unwrap(), 1.0);
    }
}
