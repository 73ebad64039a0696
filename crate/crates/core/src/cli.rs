//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric failure (tolerance out of
//! reach, argument outside the domain, quadrature failure), 3 a verification
//! check failed.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};

use crate::coeffs::{CoefficientTable, Family};
use crate::demo::{linear_grid, scan_envelope_violations};
use crate::oracle::QuadratureSpec;
use crate::record::{format_real, CheckRecord, CoefficientRow, OutputRecord, Payload, WitnessRecord};
use crate::series::{CertifiedValue, Evaluator, SeriesKind, Truncation};
use crate::verify::{run_checks, VerifyConfig};
use crate::{Error, Real, DEFAULT_PRECISION, PRECISION_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

const DEFAULT_TOL: &str = "1e-12";

#[derive(Debug, Parser)]
#[command(name = "envelope", version, about = "Certified enclosures from enveloping asymptotic series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print exact coefficients β_k, β̃_k or β̂_k for k = 0..=K.
    Coeffs {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        max_k: usize,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Evaluate a function with a certified one-sided error bound.
    Eval {
        #[arg(long, value_enum)]
        series: SeriesArg,
        #[arg(long, allow_negative_numbers = true)]
        z: String,
        /// Largest acceptable bound [default: 1e-12].
        #[arg(long, conflicts_with = "terms")]
        tol: Option<String>,
        /// Number of terms to sum.
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Enclosure of the series part between partial sums K and K + 1.
    Bound {
        #[arg(long, value_enum)]
        series: SeriesArg,
        #[arg(long, allow_negative_numbers = true)]
        z: String,
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Cross-check the series against the independent oracles.
    Verify {
        /// Wider grids at 512 bits, checks run concurrently.
        #[arg(long)]
        deep: bool,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Search for points where J(x) + exp(-b x) escapes the Binet bounds.
    Demo {
        #[arg(long, allow_negative_numbers = true)]
        b: String,
        #[arg(long, default_value = "5", allow_negative_numbers = true)]
        x_from: String,
        #[arg(long, default_value = "20", allow_negative_numbers = true)]
        x_to: String,
        #[arg(long, default_value_t = 15)]
        steps: usize,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Beta,
    BetaTilde,
    BetaHat,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Beta => Family::Beta,
            FamilyArg::BetaTilde => Family::BetaTilde,
            FamilyArg::BetaHat => Family::BetaHat,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeriesArg {
    Binet,
    CentralBinom,
    GammaHalf,
    Demoivre,
}

impl From<SeriesArg> for SeriesKind {
    fn from(s: SeriesArg) -> SeriesKind {
        match s {
            SeriesArg::Binet => SeriesKind::BinetJ,
            SeriesArg::CentralBinom => SeriesKind::CentralBinomial,
            SeriesArg::GammaHalf => SeriesKind::GammaHalf,
            SeriesArg::Demoivre => SeriesKind::DeMoivre,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPrecision(_) => Failure::Usage(e.to_string()),
            other => Failure::Numeric(other),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Runs the tool on `argv` (program name first) against the process's
/// standard streams.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_cli_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_NUMERIC
        }
    }
}

fn resolve_precision(flag: Option<u32>) -> std::result::Result<u32, Failure> {
    let precision = match flag {
        Some(p) => p,
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{PRECISION_ENV}={v} is not a bit count")))?,
            Err(_) => DEFAULT_PRECISION,
        },
    };
    crate::check_precision(precision).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_real(name: &str, text: &str, precision: u32) -> std::result::Result<Real, Failure> {
    match Real::parse(text) {
        Ok(p) => Ok(Real::with_val(precision, p)),
        Err(e) => Err(Failure::Usage(format!("--{name} {text}: {e}"))),
    }
}

fn parse_positive_integer(name: &str, value: &Real) -> std::result::Result<u64, Failure> {
    if value.is_integer() && *value >= 1 {
        if let Some(n) = value.to_integer().and_then(|i| i.to_u64()) {
            return Ok(n);
        }
    }
    Err(Failure::Numeric(Error::Domain(format!(
        "--{name} must be a positive integer for this series, got {}",
        value.to_f64()
    ))))
}

fn write_out(out: &mut dyn Write, text: &str) -> std::result::Result<(), Failure> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Coeffs { family, max_k, format } => coeffs(family.into(), max_k, format, out),
        Command::Eval {
            series,
            z,
            tol,
            terms,
            precision,
            format,
        } => eval(series.into(), &z, tol, terms, precision, format, out),
        Command::Bound {
            series,
            z,
            terms,
            precision,
            format,
        } => bound(series.into(), &z, terms, precision, format, out),
        Command::Verify { deep, format } => verify(deep, format, out),
        Command::Demo {
            b,
            x_from,
            x_to,
            steps,
            k_max,
            precision,
            format,
        } => demo(&b, &x_from, &x_to, steps, k_max, precision, format, out),
    }
}

fn coeffs(family: Family, max_k: usize, format: Format, out: &mut dyn Write) -> Outcome {
    let table = CoefficientTable::generate(family, max_k + 1);
    let rows: Vec<CoefficientRow> = table
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| CoefficientRow { k, value: v.to_string() })
        .collect();
    let text = match format {
        Format::Json => {
            let record = OutputRecord::new(
                "coeffs",
                params(&[("family", family.to_string()), ("max_k", max_k.to_string())]),
                0,
                Payload::Coefficients {
                    family: family.to_string(),
                    rows,
                },
            );
            record.to_json() + "\n"
        }
        Format::Csv => {
            let mut s = format!("k,{family}\n");
            for r in &rows {
                s += &format!("{},{}\n", r.k, r.value);
            }
            s
        }
        Format::Plain => rows.iter().map(|r| format!("{:>3}  {}\n", r.k, r.value)).collect(),
    };
    write_out(out, &text)?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn eval(
    kind: SeriesKind,
    z_text: &str,
    tol: Option<String>,
    terms: Option<usize>,
    precision: Option<u32>,
    format: Format,
    out: &mut dyn Write,
) -> Outcome {
    let p = resolve_precision(precision)?;
    let ev = Evaluator::new(p)?;
    let z = parse_real("z", z_text, p.max(64) + 64)?;
    let mut echo = vec![("series", kind.to_string()), ("z", z_text.to_string())];
    let truncation = match terms {
        Some(k) => {
            echo.push(("terms", k.to_string()));
            Truncation::Terms(k)
        }
        None => {
            let tol_text = tol.unwrap_or_else(|| DEFAULT_TOL.to_string());
            let tol = parse_real("tol", &tol_text, p)?;
            echo.push(("tol", tol_text));
            Truncation::Tolerance(tol)
        }
    };
    let value: CertifiedValue = match kind {
        SeriesKind::BinetJ => ev.ln_gamma(&z, &truncation)?,
        SeriesKind::GammaHalf => ev.ln_gamma_plus_half(&z, &truncation)?,
        SeriesKind::CentralBinomial => ev.ln_central_binomial(parse_positive_integer("z", &z)?, &truncation)?,
        SeriesKind::DeMoivre => ev.ln_factorial_demoivre(parse_positive_integer("z", &z)?, &truncation)?,
    };
    let payload = Payload::certified(&value, p);
    emit_single("eval", &echo, p, payload, format, out)?;
    Ok(EXIT_OK)
}

fn bound(
    kind: SeriesKind,
    z_text: &str,
    terms: usize,
    precision: Option<u32>,
    format: Format,
    out: &mut dyn Write,
) -> Outcome {
    let p = resolve_precision(precision)?;
    let ev = Evaluator::new(p)?;
    let z = parse_real("z", z_text, p + 64)?;
    let iv = ev.envelope_interval(kind, &z, terms)?;
    let echo = vec![
        ("series", kind.to_string()),
        ("z", z_text.to_string()),
        ("terms", terms.to_string()),
    ];
    emit_single("bound", &echo, p, Payload::envelope(&iv, p), format, out)?;
    Ok(EXIT_OK)
}

// Output for commands whose payload is one flat record.
fn emit_single(
    command: &str,
    echo: &[(&str, String)],
    precision: u32,
    payload: Payload,
    format: Format,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let fields: Vec<(String, String)> = match &payload {
        Payload::Certified {
            value,
            lo,
            hi,
            bound,
            error_sign,
            k_used,
        } => vec![
            ("k_used".into(), k_used.to_string()),
            ("value".into(), value.clone()),
            ("error_sign".into(), format!("{error_sign:+}")),
            ("bound".into(), bound.clone()),
            ("lo".into(), lo.clone()),
            ("hi".into(), hi.clone()),
        ],
        Payload::Envelope { lo, hi, bound, k_used } => vec![
            ("k_used".into(), k_used.to_string()),
            ("lo".into(), lo.clone()),
            ("hi".into(), hi.clone()),
            ("bound".into(), bound.clone()),
        ],
        _ => Vec::new(),
    };
    let text = match format {
        Format::Json => OutputRecord::new(command, params(echo), precision, payload).to_json() + "\n",
        Format::Csv => {
            let mut names: Vec<String> = echo.iter().map(|(k, _)| k.to_string()).collect();
            let mut values: Vec<String> = echo.iter().map(|(_, v)| v.clone()).collect();
            names.push("precision".into());
            values.push(precision.to_string());
            for (k, v) in fields {
                names.push(k);
                values.push(v);
            }
            format!("{}\n{}\n", names.join(","), values.join(","))
        }
        Format::Plain => {
            let mut s = String::new();
            for (k, v) in echo {
                s += &format!("{k:<11}{v}\n");
            }
            s += &format!("{:<11}{precision}\n", "precision");
            for (k, v) in fields {
                s += &format!("{k:<11}{v}\n");
            }
            s
        }
    };
    write_out(out, &text)
}

fn verify(deep: bool, format: Format, out: &mut dyn Write) -> Outcome {
    let config = if deep {
        VerifyConfig::deep()
    } else {
        VerifyConfig::standard()
    };
    let outcomes = run_checks(&config, deep);
    let passed = outcomes.iter().all(|c| c.passed);
    let text = match format {
        Format::Json => {
            let checks = outcomes
                .iter()
                .map(|c| CheckRecord {
                    name: c.name.to_string(),
                    passed: c.passed,
                    detail: c.detail.clone(),
                })
                .collect();
            OutputRecord::new(
                "verify",
                params(&[("deep", deep.to_string())]),
                config.precision,
                Payload::Verification { passed, checks },
            )
            .to_json()
                + "\n"
        }
        Format::Csv => {
            let mut s = String::from("check,passed,detail\n");
            for c in &outcomes {
                s += &format!("{},{},\"{}\"\n", c.name, c.passed, c.detail.replace('"', "'"));
            }
            s
        }
        Format::Plain => {
            let mut s = String::new();
            for c in &outcomes {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                s += &format!("{tag}  {:<24}{}\n", c.name, c.detail);
            }
            s += &format!("{} of {} checks passed\n", outcomes.iter().filter(|c| c.passed).count(), outcomes.len());
            s
        }
    };
    write_out(out, &text)?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
}

#[allow(clippy::too_many_arguments)]
fn demo(
    b_text: &str,
    from_text: &str,
    to_text: &str,
    steps: usize,
    k_max: usize,
    precision: Option<u32>,
    format: Format,
    out: &mut dyn Write,
) -> Outcome {
    let p = resolve_precision(precision)?;
    let spec = QuadratureSpec::new(p)?;
    let b = parse_real("b", b_text, p)?;
    let from = parse_real("x-from", from_text, p)?;
    let to = parse_real("x-to", to_text, p)?;
    let grid = linear_grid(&from, &to, steps, p);
    let witnesses = scan_envelope_violations(Some(&b), &grid, k_max, &spec)?;
    let control = scan_envelope_violations(None, &grid, k_max, &spec)?;
    let records: Vec<WitnessRecord> = witnesses.iter().map(|w| WitnessRecord::new(w, p)).collect();
    let text = match format {
        Format::Json => {
            let echo = params(&[
                ("b", b_text.to_string()),
                ("x_from", from_text.to_string()),
                ("x_to", to_text.to_string()),
                ("steps", steps.to_string()),
                ("k_max", k_max.to_string()),
            ]);
            OutputRecord::new(
                "demo",
                echo,
                p,
                Payload::Demo {
                    witness_count: records.len(),
                    control_witness_count: control.len(),
                    first: records.first().cloned(),
                    witnesses: records,
                },
            )
            .to_json()
                + "\n"
        }
        Format::Csv => {
            let mut s = String::from("x,k,remainder,next_term_bound,mode,error_estimate\n");
            for r in &records {
                s += &format!(
                    "{},{},{},{},{},{}\n",
                    r.x, r.k, r.remainder, r.next_term_bound, r.mode, r.error_estimate
                );
            }
            s
        }
        Format::Plain => {
            let short = |x: &Real| format_real(x, 32);
            let mut s = format!(
                "f(x) = J(x) + exp(-{b_text} x), x in [{from_text}, {to_text}] ({} points), k <= {k_max}\n",
                grid.len()
            );
            match witnesses.first() {
                Some(w) => {
                    s += &format!(
                        "first witness: x = {}, k = {}, {} (remainder {}, next term {})\n",
                        short(&w.x),
                        w.k,
                        w.mode,
                        short(&w.remainder),
                        short(&w.next_term_bound)
                    )
                }
                None => s += "no witness on this grid\n",
            }
            s += &format!("witnesses: {}\n", witnesses.len());
            for w in &witnesses {
                s += &format!(
                    "  x = {:<12} k = {}  {:<18} remainder {:<14} next term {}\n",
                    short(&w.x),
                    w.k,
                    w.mode.to_string(),
                    short(&w.remainder),
                    short(&w.next_term_bound)
                );
            }
            s += &format!("unperturbed control witnesses: {}\n", control.len());
            s
        }
    };
    write_out(out, &text)?;
    Ok(EXIT_OK)
}
