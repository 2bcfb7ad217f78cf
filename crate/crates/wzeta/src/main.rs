//! Command-line front end.
//!
//! Tables are TSV on stdout, structured reports are JSON on stdout, and
//! diagnostics go to stderr. Exit code 0 means success, 1 means a verified
//! assertion band failed, 2 means the input was unusable. Output is
//! deterministic for fixed input and flags; floats are printed with at most
//! twelve significant digits.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use wzeta::bass::BassMatrix;
use wzeta::census::{count_table, EnumerationLimits};
use wzeta::error::{Error, Result};
use wzeta::graph::{parse_graph, WeightedGraph};
use wzeta::pgt::{asymptotic_check, pgt_fit};
use wzeta::scalar::Scalar;
use wzeta::spectral::{
    combinatorial_period, decompose, prefix_invariant, verify_pf, Tolerances,
};
use wzeta::translations::{
    joint_spectrum, parse_family, verify_building_pgt, zeta_multivariate, TranslationFamily,
};
use wzeta::zeta::ZetaFunction;
use wzeta::Rational;

type Complex64 = nalgebra::Complex<f64>;

/// println! that propagates write failures instead of panicking, so a
/// consumer closing the pipe early ends the run cleanly.
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout(), $($arg)*).map_err(Error::Io)?
    };
}

#[derive(Parser)]
#[command(
    name = "wzeta",
    about = "Weighted zeta functions, transfer operators and cycle counting on graphs"
)]
struct Cli {
    /// Exact rational arithmetic where supported.
    #[arg(long, global = true)]
    rational: bool,

    /// Worker threads for parallel sections; 0 picks the machine default.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Check a graph document and print its validation report as JSON.
    Validate { input: PathBuf },

    /// Print the counting functions N, theta, psi, pi as TSV.
    Counts {
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_len: usize,
    },

    /// Print the inverse zeta polynomial, optionally with the
    /// log-derivative series and a point evaluation.
    Zeta {
        input: PathBuf,
        /// Also print N_1..N_M from the logarithmic derivative.
        #[arg(long, value_name = "M")]
        series: Option<usize>,
        /// Evaluate Z at u = RE,IM; points too close to a zero of the
        /// inverse polynomial are rejected as poles.
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
        eval: Option<String>,
    },

    /// Print the block decomposition with Perron-Frobenius reports as JSON.
    Decompose { input: PathBuf },

    /// Print growth parameters, the residual fit and the convergence table.
    Pgt {
        input: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
    },

    /// Translation-family commands on a family document.
    Building {
        #[command(subcommand)]
        sub: BuildingSub,
    },
}

#[derive(Subcommand)]
enum BuildingSub {
    /// Verify N(k) against the quasicharacter expansion over a cap box.
    Check {
        input: PathBuf,
        /// Per-axis caps, comma separated; a single value applies to all axes.
        #[arg(long, default_value = "6")]
        kmax: String,
    },

    /// Print N(k) for every lattice point in the cap box as TSV.
    Nk {
        input: PathBuf,
        #[arg(long, default_value = "6")]
        kmax: String,
    },

    /// Evaluate the multivariate zeta function at one point.
    Zeta {
        input: PathBuf,
        /// Coordinates as RE,IM pairs separated by semicolons.
        #[arg(long, value_name = "RE,IM;...", allow_hyphen_values = true)]
        u: String,
    },

    /// Print the joint spectrum as JSON.
    Spectrum { input: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("wzeta: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(code) => code,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wzeta: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    let rational = cli.rational;
    match cli.verb {
        Verb::Validate { input } => cmd_validate(&input),
        Verb::Counts { input, max_len } => {
            let g = load_graph(&input)?;
            if rational {
                cmd_counts(&g.convert::<Rational>(), max_len)
            } else {
                cmd_counts(&g, max_len)
            }
        }
        Verb::Zeta { input, series, eval } => {
            let g = load_graph(&input)?;
            if rational {
                cmd_zeta(&g.convert::<Rational>(), series, eval.as_deref())
            } else {
                cmd_zeta(&g, series, eval.as_deref())
            }
        }
        Verb::Decompose { input } => {
            let g = load_graph(&input)?;
            if rational {
                cmd_decompose(&g.convert::<Rational>())
            } else {
                cmd_decompose(&g)
            }
        }
        Verb::Pgt { input, max_len } => {
            let g = load_graph(&input)?;
            if rational {
                cmd_pgt(&g.convert::<Rational>(), max_len)
            } else {
                cmd_pgt(&g, max_len)
            }
        }
        Verb::Building { sub } => match sub {
            BuildingSub::Check { input, kmax } => {
                if rational {
                    cmd_building_check(&load_family::<Rational>(&input)?, &kmax)
                } else {
                    cmd_building_check(&load_family::<f64>(&input)?, &kmax)
                }
            }
            BuildingSub::Nk { input, kmax } => {
                if rational {
                    cmd_building_nk(&load_family::<Rational>(&input)?, &kmax)
                } else {
                    cmd_building_nk(&load_family::<f64>(&input)?, &kmax)
                }
            }
            BuildingSub::Zeta { input, u } => {
                if rational {
                    cmd_building_zeta(&load_family::<Rational>(&input)?, &u)
                } else {
                    cmd_building_zeta(&load_family::<f64>(&input)?, &u)
                }
            }
            BuildingSub::Spectrum { input } => {
                if rational {
                    cmd_building_spectrum(&load_family::<Rational>(&input)?)
                } else {
                    cmd_building_spectrum(&load_family::<f64>(&input)?)
                }
            }
        },
    }
}

fn load_graph(path: &Path) -> Result<WeightedGraph<f64>> {
    parse_graph(&fs::read_to_string(path)?)
}

fn load_family<W: Scalar>(path: &Path) -> Result<TranslationFamily<W>> {
    parse_family(&fs::read_to_string(path)?)
}

fn cmd_validate(input: &Path) -> Result<ExitCode> {
    let g = load_graph(input)?;
    let report = g.validate();
    print_json(serde_json::to_value(&report)?)?;
    Ok(exit_band(report.ok))
}

fn cmd_counts<W: Scalar>(g: &WeightedGraph<W>, max_len: usize) -> Result<ExitCode> {
    let table = count_table(g, max_len, &EnumerationLimits::default())?;
    out!("m\tN\ttheta\tpsi\tpi");
    for m in 1..=max_len {
        out!(
            "{m}\t{}\t{}\t{}\t{}",
            fmt_weight(&table.n(m)),
            fmt_weight(&table.theta(m)),
            fmt_weight(&table.psi(m)),
            fmt_weight(&table.pi(m)),
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_zeta<W: Scalar>(
    g: &WeightedGraph<W>,
    series: Option<usize>,
    eval: Option<&str>,
) -> Result<ExitCode> {
    let z = ZetaFunction::new(g)?;
    out!("{}", join_weights(z.inverse_coeffs()));
    if let Some(m) = series {
        out!("{}", join_weights(&z.log_derivative_series(m)?));
    }
    if let Some(spec) = eval {
        let value = z.eval(parse_complex(spec)?)?;
        out!("{} {}", fmt_float(value.re), fmt_float(value.im));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_decompose<W: Scalar>(g: &WeightedGraph<W>) -> Result<ExitCode> {
    let t = BassMatrix::build(g)?;
    let tol = Tolerances::default();
    let dec = decompose(&t, &tol)?;
    let mut all_ok = true;
    let mut blocks = Vec::with_capacity(dec.blocks.len());
    for b in &dec.blocks {
        let period = combinatorial_period(&b.matrix.support_successors());
        let pf = if b.irreducible && b.radius > 0.0 {
            let report = verify_pf(&b.matrix, &tol)?;
            all_ok &= report.ok;
            serde_json::to_value(&report)?
        } else {
            Value::Null
        };
        blocks.push(json!({
            "edges": b.edges,
            "radius": b.radius,
            "irreducible": b.irreducible,
            "subdominant": b.subdominant,
            "period": period,
            "pf": pf,
        }));
    }
    print_json(json!({
        "spectral_radius": dec.spectral_radius,
        "prefix_invariant": prefix_invariant(&t, &dec),
        "blocks": blocks,
    }))?;
    Ok(exit_band(all_ok))
}

fn cmd_pgt<W: Scalar>(g: &WeightedGraph<W>, max_len: usize) -> Result<ExitCode> {
    let limits = EnumerationLimits::default();
    let fit = pgt_fit(g, max_len, &limits)?;
    let p = &fit.parameters;
    out!("r\t{}", fmt_float(p.r));
    out!("s\t{}", p.s);
    for (i, c) in p.components.iter().enumerate() {
        out!("n{}\t{}", i + 1, c.period);
    }
    out!("K\t{}", p.period_lcm);
    match p.c_constant {
        Some(c) => out!("C\t{}", fmt_float(c)),
        None => out!("C\tundefined"),
    }
    out!("eps_gap\t{}", fmt_float(p.eps_gap));
    out!("exact_model\t{}", fit.exact_model);
    out!("base\t{}", fmt_float(fit.base));
    out!("fitted_constant\t{}", fmt_float(fit.fitted_constant));
    out!("max_ratio\t{}", fmt_float(fit.max_ratio));
    out!("fit_ok\t{}", fit.ok);
    match asymptotic_check(g, max_len, &limits) {
        Ok(table) => {
            out!("n\tm\tpsi_ratio\ttheta_ratio\tpi_ratio");
            for row in &table.rows {
                out!(
                    "{}\t{}\t{}\t{}\t{}",
                    row.n,
                    row.m,
                    fmt_float(row.psi_ratio),
                    fmt_float(row.theta_ratio),
                    fmt_float(row.pi_ratio),
                );
            }
        }
        Err(Error::HypothesisViolated(msg)) => {
            eprintln!("wzeta: convergence table skipped: {msg}");
        }
        Err(e) => return Err(e),
    }
    Ok(exit_band(fit.ok))
}

fn cmd_building_check<W: Scalar>(fam: &TranslationFamily<W>, kmax: &str) -> Result<ExitCode> {
    let caps = parse_caps(kmax, fam.rank())?;
    let report = verify_building_pgt(fam, &caps)?;
    out!("caps\t{}", join_plain(&report.caps, ","));
    out!("points\t{}", report.points_checked);
    out!("max_deviation\t{}", fmt_float(report.max_deviation));
    if let Some(l) = &report.leading {
        out!("leading_k\t{}", join_plain(&l.k, ","));
        out!("leading_n\t{}", fmt_float(l.n_value));
        out!("leading_peripheral_sum\t{}", fmt_float(l.peripheral_sum));
        out!("leading_terms\t{}", l.peripheral_terms);
        out!("leading_gap\t{}", fmt_float(l.gap));
    }
    out!("ok\t{}", report.ok);
    Ok(exit_band(report.ok))
}

fn cmd_building_nk<W: Scalar>(fam: &TranslationFamily<W>, kmax: &str) -> Result<ExitCode> {
    let caps = parse_caps(kmax, fam.rank())?;
    let header: Vec<String> = (1..=fam.rank()).map(|j| format!("k{j}")).collect();
    out!("{}\tN", header.join("\t"));
    for k in fam.lattice().members_in_box(&caps)? {
        out!("{}\t{}", join_plain(&k, "\t"), fmt_weight(&fam.n_of_k(&k)?));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_building_zeta<W: Scalar>(fam: &TranslationFamily<W>, u: &str) -> Result<ExitCode> {
    let point = parse_point(u, fam.rank())?;
    let z = zeta_multivariate(fam, &point)?;
    print_json(json!({
        "u": z.u.iter().map(complex_value).collect::<Vec<_>>(),
        "rational": complex_value(&z.rational),
        "quasicharacter": complex_value(&z.quasicharacter),
        "series": z.series.as_ref().map(complex_value).unwrap_or(Value::Null),
        "max_deviation": z.max_deviation,
        "tolerance": z.tolerance,
        "ok": z.ok,
    }))?;
    Ok(exit_band(z.ok))
}

fn cmd_building_spectrum<W: Scalar>(fam: &TranslationFamily<W>) -> Result<ExitCode> {
    let quasis = joint_spectrum(fam)?;
    let list: Vec<Value> = quasis
        .iter()
        .map(|q| {
            json!({
                "z": q.z.iter().map(complex_value).collect::<Vec<_>>(),
                "mult": q.mult,
            })
        })
        .collect();
    print_json(json!({ "count": list.len(), "quasicharacters": list }))?;
    Ok(ExitCode::SUCCESS)
}

fn exit_band(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Plain decimal with at most twelve significant digits, no exponent
/// notation, trailing zeros trimmed. Stable across algebraically equivalent
/// evaluation orders that agree to twelve digits.
fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("numeric exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let point = exp + 1;
    let mut out = String::new();
    if mantissa.starts_with('-') {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', point.unsigned_abs() as usize));
        out.push_str(digits);
    } else if point as usize >= digits.len() {
        out.push_str(digits);
        out.extend(std::iter::repeat_n('0', point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

fn fmt_weight<W: Scalar>(w: &W) -> String {
    if W::EXACT {
        w.to_string()
    } else {
        fmt_float(w.to_f64().unwrap_or(f64::NAN))
    }
}

fn join_weights<W: Scalar>(ws: &[W]) -> String {
    ws.iter().map(fmt_weight).collect::<Vec<_>>().join(" ")
}

fn join_plain<T: std::fmt::Display>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn float_value(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = fmt_float(x).parse().expect("formatted float parses");
    serde_json::Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null)
}

fn complex_value(z: &Complex64) -> Value {
    Value::Array(vec![float_value(z.re), float_value(z.im)])
}

/// Rounds every float in a JSON tree in place; integers pass through.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    *v = float_value(x);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn print_json(mut v: Value) -> Result<()> {
    round_floats(&mut v);
    out!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
    Ok(())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidArgument(format!("expected a number, got {s:?}")))
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse_f64(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?)),
        _ => Err(Error::InvalidArgument(format!(
            "expected RE or RE,IM, got {s:?}"
        ))),
    }
}

fn parse_point(s: &str, d: usize) -> Result<Vec<Complex64>> {
    let coords: Vec<Complex64> =
        s.split(';').map(parse_complex).collect::<Result<_>>()?;
    if coords.len() != d {
        return Err(Error::InvalidArgument(format!(
            "expected {d} coordinates separated by ';', got {}",
            coords.len()
        )));
    }
    Ok(coords)
}

fn parse_caps(s: &str, d: usize) -> Result<Vec<usize>> {
    let caps: Vec<usize> = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("expected a cap, got {part:?}")))
        })
        .collect::<Result<_>>()?;
    if caps.len() == 1 && d > 1 {
        return Ok(vec![caps[0]; d]);
    }
    if caps.len() != d {
        return Err(Error::InvalidArgument(format!(
            "expected 1 or {d} caps, got {}",
            caps.len()
        )));
    }
    Ok(caps)
}
