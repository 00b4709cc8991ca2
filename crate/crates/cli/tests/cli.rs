//! End-to-end runs of the `qfcre` binary.

use std::io::Write;
use std::process::{Command, Output};

use qfcre::simulation::parse_report_rows;

fn qfcre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfcre"))
        .args(args)
        .env_remove("QFCRE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn exponential_entropy_of_order_one_is_one() {
    let o = qfcre(&["entropy", "--model", "exponential(lambda=1)", "--alpha", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert!((r[0][1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn forced_quadrature_agrees_with_closed_form() {
    let closed = qfcre(&["entropy", "--model", "uniform(b=2)", "--alpha", "0.1:1:4"]);
    let quad = qfcre(&[
        "entropy",
        "--model",
        "uniform(b=2)",
        "--alpha",
        "0.1:1:4",
        "--quadrature",
    ]);
    let (c, q) = (rows(&stdout(&closed)), rows(&stdout(&quad)));
    assert_eq!(c.len(), 4);
    for (c, q) in c.iter().zip(&q) {
        assert_eq!((c[2].as_str(), q[2].as_str()), ("closed_form", "quadrature"));
        let (c, q): (f64, f64) = (c[1].parse().unwrap(), q[1].parse().unwrap());
        assert!((c - q).abs() < 1e-8 * c);
    }
}

#[test]
fn order_out_of_range_is_a_validation_error_with_no_output() {
    let o = qfcre(&["entropy", "--model", "exponential(lambda=1)", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let e = stderr(&o);
    assert_eq!(e.lines().count(), 1);
    assert!(e.contains("1.5") && e.contains("[0, 1]"), "{e}");
}

#[test]
fn bad_model_spec_names_the_token() {
    let o = qfcre(&["entropy", "--model", "exponential(lambda=abc)", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`abc`"));
    let o = qfcre(&["entropy", "--model", "gumbel(mu=0)", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gumbel"));
}

#[test]
fn unknown_flag_is_rejected() {
    let o = qfcre(&["chaos", "--a", "4", "--alpha", "0.5", "--colour"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn infinite_mean_model_fails_without_output() {
    // pareto1 with beta >= 1 has an infinite mean, so the integral diverges.
    let o = qfcre(&[
        "entropy",
        "--model",
        "pareto1(beta=1.5)",
        "--alpha",
        "1",
        "--quadrature",
    ]);
    match o.status.code() {
        Some(1) => assert!(stderr(&o).contains("beta"), "{}", stderr(&o)),
        Some(2) => assert!(stderr(&o).contains("converge"), "{}", stderr(&o)),
        other => panic!("unexpected status {other:?}: {}", stderr(&o)),
    }
    assert!(o.stdout.is_empty());
}

#[test]
fn dynamic_profile_reports_trend() {
    let o = qfcre(&[
        "entropy",
        "--model",
        "exponential(lambda=2)",
        "--alpha",
        "0.5",
        "--dynamic",
        "--u-grid",
        "0,0.3,0.6",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 3);
    // Memoryless: the dynamic entropy does not move.
    assert!(r.iter().all(|row| row[5] == "constant"));
}

#[test]
fn simulate_report_reparses_and_shows_negative_bias() {
    let o = qfcre(&[
        "simulate",
        "--model",
        "power_pareto(C=1.5,l1=2,l2=0.25)",
        "--alpha",
        "0.25",
        "--n",
        "50,1000",
        "--reps",
        "5000",
        "--seed",
        "7",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = parse_report_rows(&stdout(&o)).unwrap();
    assert_eq!(report.len(), 2);
    assert!((report[0].bias - -0.110).abs() < 0.01, "{}", report[0].bias);
    assert!(report[1].bias.abs() < report[0].bias.abs());
}

#[test]
fn simulate_is_reproducible_across_thread_counts() {
    let args = [
        "simulate",
        "--model",
        "exponential(lambda=1)",
        "--alpha",
        "0.5",
        "--n",
        "20,40",
        "--reps",
        "200",
    ];
    let one = qfcre(&[&args[..], &["--threads", "1"]].concat());
    let four = qfcre(&[&args[..], &["--threads", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn too_few_replications_is_rejected() {
    let o = qfcre(&[
        "simulate",
        "--model",
        "exponential(lambda=1)",
        "--alpha",
        "0.5",
        "--reps",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn estimate_reads_a_sample_file_and_writes_to_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sample.txt");
    std::fs::write(&input, "# header comment\n3\n1\n2\n\n4\n").unwrap();
    let output = dir.path().join("out.csv");
    let o = qfcre(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--alpha",
        "1",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let r = rows(&std::fs::read_to_string(&output).unwrap());
    assert_eq!(r[0][1], "4");
    // Spacings of 1,2,3,4 are all 1; weights (n-i)/n * ln(n/(n-i)) for i = 1..3.
    let expected: f64 = (1..4).map(|i| (4 - i) as f64 / 4.0 * (4.0 / (4 - i) as f64).ln()).sum();
    assert!((r[0][2].parse::<f64>().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn estimate_windows_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("series.txt");
    std::fs::write(&input, (1..=10).map(|k| format!("{k}\n")).collect::<String>()).unwrap();
    let o = qfcre(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--alpha",
        "0.5",
        "--window",
        "4",
        "--step",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let starts: Vec<String> = rows(&stdout(&o)).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(starts, ["0", "3", "6"]);

    std::fs::write(&input, "1\n2\nx\n").unwrap();
    let o = qfcre(&["estimate", "--input", input.to_str().unwrap(), "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
}

#[test]
fn chaos_sweep_orders_chaotic_above_periodic() {
    let o = qfcre(&[
        "chaos",
        "--a",
        "4,3.5,2.5",
        "--x0",
        "0.1",
        "--length",
        "2000",
        "--alpha",
        "0.5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let e: Vec<f64> = rows(&stdout(&o)).iter().map(|r| r[2].parse().unwrap()).collect();
    // Rows come back sorted by a: 2.5, 3.5, 4.
    assert!(e[2] > e[1] && e[1] > e[0], "{e:?}");
}

#[test]
fn finance_yearly_and_returns() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "Date,Open,Close").unwrap();
    let closes = [100.0, 101.0, 99.5, 102.0, 103.0, 97.0, 99.0, 104.0];
    let dates = [
        "2018-12-27",
        "2018-12-28",
        "2018-12-31",
        "2019-01-02",
        "2019-01-03",
        "2019-01-04",
        "2019-01-07",
        "2019-01-08",
    ];
    for (d, c) in dates.iter().zip(closes) {
        writeln!(file, "{d},0,{c}").unwrap();
    }
    let path = file.path().to_str().unwrap();

    let o = qfcre(&["finance", "--input", path, "--alpha", "0.2,1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    let periods: Vec<&str> = r.iter().map(|row| row[0].as_str()).collect();
    assert_eq!(periods, ["2018", "2018", "2019", "2019"]);

    let o = qfcre(&["finance", "--input", path, "--returns"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), closes.len() - 1);
    let first: f64 = r[0][1].parse().unwrap();
    assert!((first - (101.0f64 / 100.0).ln()).abs() < 1e-15);
}

#[test]
fn finance_rejects_non_positive_price() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "Date,Close\n2019-01-02,10\n2019-01-03,-1\n2019-01-04,11\n").unwrap();
    let o = qfcre(&["finance", "--input", file.path().to_str().unwrap(), "--alpha", "0.2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
}

#[test]
fn verify_prints_one_line_per_check_and_flags_failures() {
    let o = qfcre(&["verify"]);
    let out = stdout(&o);
    let checks: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
        .collect();
    assert_eq!(checks.len(), 14);
    let failed = checks.iter().filter(|l| l.starts_with("FAIL")).count();
    assert_eq!(o.status.code(), Some(if failed == 0 { 0 } else { 1 }));
}

#[test]
fn threads_env_fallback_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_qfcre"))
        .args(["chaos", "--a", "4", "--alpha", "0.5"])
        .env("QFCRE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("QFCRE_THREADS"));
}
