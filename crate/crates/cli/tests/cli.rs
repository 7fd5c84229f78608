use std::process::{Command, Output};

use num_bigint::BigInt;
use num_integer::Roots;

fn domreal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domreal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn parse_rational(s: &str) -> (BigInt, BigInt) {
    match s.split_once('/') {
        Some((n, d)) => (n.parse().unwrap(), d.parse().unwrap()),
        None => (s.parse().unwrap(), BigInt::from(1)),
    }
}

#[test]
fn eval_sqrt_two_against_integer_root() {
    let o = domreal(&["eval", "sqrt(2)", "--bits", "10", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (ln, ld) = parse_rational(v["lower"].as_str().unwrap());
    let (un, ud) = parse_rational(v["upper"].as_str().unwrap());
    // width ≤ 2^-10: (un·ld − ln·ud)·2^10 ≤ ud·ld
    assert!((&un * &ld - &ln * &ud) * BigInt::from(1024) <= &ud * &ld);
    // floor(√2·2^40)/2^40 and the next grid point bracket √2
    let s = BigInt::from(1) << 40;
    let r = Roots::sqrt(&(BigInt::from(2) * &s * &s));
    assert!(&ln * &s <= (&r + 1) * &ld);
    assert!(&r * &ud <= &un * &s);
    assert!(v["lower_decimal"].as_str().unwrap().starts_with("1.414"));
}

#[test]
fn eval_exact_sums() {
    let o = domreal(&["eval", "1/3 + 1/6", "--bits", "5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("[1/2, 1/2]\n"));
    let o = domreal(&["eval", "abs(-2)", "--bits", "1"]);
    assert!(stdout(&o).starts_with("[2, 2]\n"));
    let o = domreal(&["eval", "-1 + 3 - 1/2", "--bits", "1"]);
    assert!(stdout(&o).starts_with("[3/2, 3/2]\n"));
}

#[test]
fn eval_csv_has_header_and_row() {
    let o = domreal(&["eval", "2 * sqrt(3)", "--bits", "20", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "expr,bits,lower,upper,width,lower_decimal,upper_decimal,width_decimal"
    );
    assert_eq!(lines.len(), 2);
}

#[test]
fn eval_exit_codes() {
    let o = domreal(&["eval", "sqrt(-1)"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("not positive"));
    let o = domreal(&["eval", "1 + * 2"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("column 5"), "{}", stderr(&o));
    let o = domreal(&["eval", "sqrt(2)", "--bits", "40", "--budget", "3"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = domreal(&["eval", "sqrt(sqrt(2))"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn argument_errors_exit_one() {
    assert_eq!(code(&domreal(&[])), 1);
    assert_eq!(code(&domreal(&["frobnicate"])), 1);
    assert_eq!(code(&domreal(&["eval", "1", "--bits", "many"])), 1);
    assert_eq!(code(&domreal(&["sqrt", "2", "--format", "xml"])), 1);
    assert_eq!(code(&domreal(&["--help"])), 0);
}

#[test]
fn sqrt_table_text() {
    let o = domreal(&["sqrt", "2"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], ["1", "4.9e-3", "8.3e-2"]);
    assert_eq!(rows[4], ["5", "5.7e-49", "5.2e-3"]);
}

#[test]
fn sqrt_table_json_and_csv() {
    let o = domreal(&["sqrt", "2", "--iters", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let widths: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["width"].as_str().unwrap())
        .collect();
    assert_eq!(widths, ["1/204", "1/235416", "1/313506783024"]);
    assert_eq!(v[0]["lower"], "24/17");
    assert_eq!(v[0]["modulus"], "1/12");

    let o = domreal(&["sqrt", "4", "--iters", "1", "--format", "csv"]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "iteration,lower,upper,width,width_decimal,modulus,modulus_decimal"
    );
    assert!(lines[1].starts_with("1,80/41,41/20,"));
}

#[test]
fn sqrt_rejects_nonpositive() {
    assert_eq!(code(&domreal(&["sqrt", "0"])), 1);
    assert_eq!(code(&domreal(&["sqrt", "-3/2"])), 1);
    assert_eq!(code(&domreal(&["sqrt", "two"])), 1);
}

#[test]
fn selftest_passes_and_is_deterministic() {
    let a = domreal(&["selftest", "--cases", "200", "--seed", "1"]);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert!(stdout(&a).contains("suites run, 0 violations"));
    let b = domreal(&["selftest", "--cases", "200", "--seed", "1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn selftest_zero_cases() {
    let o = domreal(&["selftest", "--cases", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 suites run"));
    let o = domreal(&["selftest", "--cases", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suites_run"], 0);
}

#[test]
fn injected_fault_exits_four_with_counterexample() {
    let o = domreal(&["selftest", "--cases", "50", "--inject-fault", "non-strict-way-below"]);
    assert_eq!(code(&o), 4);
    let out = stdout(&o);
    assert!(out.contains("VIOLATION in interval.way_below"), "{out}");
    assert!(out.contains("minimized:"));
}

#[test]
fn library_entry_point_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let c = domreal_cli::run(["domreal", "sqrt", "2", "--iters", "2"], &mut out, &mut err);
    assert_eq!(c, 0);
    assert_eq!(out, domreal(&["sqrt", "2", "--iters", "2"]).stdout);
}
