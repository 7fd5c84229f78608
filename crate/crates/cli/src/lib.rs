//! The `domreal` command line: guaranteed enclosures of expressions, the
//! Newton width/modulus table and the randomized law checks.

pub mod expr;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use domreal::newton::{sqrt_table, SqrtTableRow};
use domreal::reals::refine;
use domreal::selftest::{self, Mutation, Report};
use domreal::{DomainError, IntervalQ, Rational};

use expr::{parse, EvalError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;
pub const EXIT_SELFTEST: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fault {
    NonStrictWayBelow,
}

#[derive(Debug, Parser)]
#[command(
    name = "domreal",
    version,
    about = "Exact real arithmetic with guaranteed enclosures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate an expression to an interval of width at most 2^-bits.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, default_value_t = 30)]
        bits: u32,
        /// Levels to search before giving up [default: 4·bits + 64].
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Newton enclosures of √q next to the modulus bound.
    Sqrt {
        #[arg(allow_negative_numbers = true)]
        q: String,
        #[arg(long, default_value_t = 5)]
        iters: usize,
    },
    /// Run the randomized law checks.
    Selftest {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
}

/// A failed command: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match &e {
            EvalError::NotPositive { .. } => EXIT_CERTIFICATE,
            EvalError::SignUndecided { .. } => EXIT_BUDGET,
            EvalError::IrrationalSqrt { .. } => EXIT_USAGE,
            EvalError::Domain(d) => domain_code(d),
        };
        Failure::new(code, e.to_string())
    }
}

impl From<DomainError> for Failure {
    fn from(e: DomainError) -> Self {
        Failure::new(domain_code(&e), e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_USAGE, format!("write failed: {e}"))
    }
}

fn domain_code(e: &DomainError) -> i32 {
    match e {
        DomainError::BudgetExhausted { .. } => EXIT_BUDGET,
        DomainError::CertificateViolated(_) | DomainError::NonPositive(_) => EXIT_CERTIFICATE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval { expr, bits, budget } => {
            let budget = budget.unwrap_or(4 * bits as usize + 64);
            eval_cmd(&expr, bits, budget, cli.format, out)
        }
        Command::Sqrt { q, iters } => sqrt_cmd(&q, iters, cli.format, out),
        Command::Selftest {
            cases,
            seed,
            inject_fault,
        } => {
            let mutation = match inject_fault {
                None => Mutation::None,
                Some(Fault::NonStrictWayBelow) => Mutation::NonStrictWayBelow,
            };
            selftest_cmd(cases, seed, mutation, cli.format, out)
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Significant figures that resolve an interval of width `2^-k`.
fn decimal_digits(k: u32) -> usize {
    (k as usize * 30103).div_ceil(100_000) + 3
}

#[derive(Debug, Serialize)]
struct Enclosure {
    expr: String,
    bits: u32,
    lower: String,
    upper: String,
    width: String,
    lower_decimal: String,
    upper_decimal: String,
    width_decimal: String,
}

impl Enclosure {
    fn new(expr: &str, bits: u32, a: &IntervalQ) -> Self {
        let sig = decimal_digits(bits);
        let width = a.length();
        Enclosure {
            expr: expr.to_string(),
            bits,
            lower: a.lo().to_string(),
            upper: a.hi().to_string(),
            lower_decimal: a.lo().to_decimal_string(sig),
            upper_decimal: a.hi().to_decimal_string(sig),
            width_decimal: width.to_decimal_string(2),
            width: width.to_string(),
        }
    }
}

/// Evaluates `src` and prints the first enclosure of width `≤ 2^-bits`.
pub fn eval_cmd(src: &str, bits: u32, budget: usize, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let e = parse(src).map_err(|e| Failure::new(EXIT_USAGE, format!("{e}\n  {src}\n  {:>1$}", "^", e.pos + 1)))?;
    let x = e.eval(budget)?;
    let a = refine(&x, bits, budget)?;
    let enc = Enclosure::new(src, bits, &a);
    match format {
        Format::Text => {
            writeln!(out, "[{}, {}]", enc.lower, enc.upper)?;
            writeln!(out, "≈ [{}, {}]", enc.lower_decimal, enc.upper_decimal)?;
            writeln!(out, "width {} ≈ {} ≤ 2^-{bits}", enc.width, enc.width_decimal)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.serialize(&enc).map_err(csv_failure)?;
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &enc).map_err(json_failure)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct Row {
    iteration: usize,
    lower: String,
    upper: String,
    width: String,
    width_decimal: String,
    modulus: String,
    modulus_decimal: String,
}

impl From<&SqrtTableRow> for Row {
    fn from(r: &SqrtTableRow) -> Self {
        Row {
            iteration: r.iteration,
            lower: r.lower.to_string(),
            upper: r.upper.to_string(),
            width: r.width.to_string(),
            width_decimal: r.width.to_decimal_string(2),
            modulus: r.modulus_bound.to_string(),
            modulus_decimal: r.modulus_bound.to_decimal_string(2),
        }
    }
}

/// Prints the width of the `n`-th Newton enclosure of `√q` next to the
/// modulus bound `(s̄_0 − s̲_0)/2^n`.
pub fn sqrt_cmd(q: &str, iters: usize, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let value: Rational = q
        .parse()
        .map_err(|e: DomainError| Failure::new(EXIT_USAGE, e.to_string()))?;
    if !value.is_positive() {
        return Err(Failure::new(EXIT_USAGE, format!("q must be positive, got {value}")));
    }
    let rows: Vec<Row> = sqrt_table(&value, iters)?.iter().map(Row::from).collect();
    match format {
        Format::Text => {
            writeln!(out, "{:<10}  {:<14}  Modulus Precision", "Iterations", "Interval Width")?;
            for r in &rows {
                writeln!(
                    out,
                    "{:<10}  {:<14}  {}",
                    r.iteration, r.width_decimal, r.modulus_decimal
                )?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if rows.is_empty() {
                w.write_record([
                    "iteration",
                    "lower",
                    "upper",
                    "width",
                    "width_decimal",
                    "modulus",
                    "modulus_decimal",
                ])
                .map_err(csv_failure)?;
            }
            for r in &rows {
                w.serialize(r).map_err(csv_failure)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows).map_err(json_failure)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct JsonSuite<'a> {
    name: &'a str,
    passed: usize,
}

#[derive(Debug, Serialize)]
struct JsonViolation<'a> {
    suite: &'a str,
    case: usize,
    reason: &'a str,
    original: &'a str,
    minimized: &'a str,
    shrink_steps: usize,
}

#[derive(Debug, Serialize)]
struct JsonReport<'a> {
    seed: u64,
    cases: usize,
    suites_run: usize,
    suites: Vec<JsonSuite<'a>>,
    violation: Option<JsonViolation<'a>>,
}

impl<'a> From<&'a Report> for JsonReport<'a> {
    fn from(r: &'a Report) -> Self {
        JsonReport {
            seed: r.seed,
            cases: r.cases,
            suites_run: r.suites.len(),
            suites: r
                .suites
                .iter()
                .map(|s| JsonSuite {
                    name: s.name,
                    passed: s.passed,
                })
                .collect(),
            violation: r.violation.as_ref().map(|v| JsonViolation {
                suite: v.suite,
                case: v.case,
                reason: &v.reason,
                original: &v.original,
                minimized: &v.minimized,
                shrink_steps: v.shrink_steps,
            }),
        }
    }
}

pub fn selftest_cmd(
    cases: usize,
    seed: u64,
    mutation: Mutation,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let report = selftest::run_with(cases, seed, mutation);
    match format {
        Format::Text => write!(out, "{report}")?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["suite", "passed", "cases"]).map_err(csv_failure)?;
            for s in &report.suites {
                w.write_record([s.name, &s.passed.to_string(), &cases.to_string()])
                    .map_err(csv_failure)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &JsonReport::from(&report)).map_err(json_failure)?;
            writeln!(out)?;
        }
    }
    match &report.violation {
        None => Ok(()),
        Some(v) => Err(Failure::new(
            EXIT_SELFTEST,
            format!("law violated in {}: {} (minimized: {})", v.suite, v.reason, v.minimized),
        )),
    }
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::new(EXIT_USAGE, format!("csv output failed: {e}"))
}

fn json_failure(e: serde_json::Error) -> Failure {
    Failure::new(EXIT_USAGE, format!("json output failed: {e}"))
}
