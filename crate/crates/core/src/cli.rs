//! Command-line front end: parse a request, run the pipeline, print a
//! certified result with optional resource statistics and oracle
//! verification.
//!
//! Exit codes: 0 success, 2 argument or numeral parse error, 3 domain error
//! (pole, exceptional set, failed certification), 4 resource cap exceeded,
//! 5 verification mismatch under `--verify`.

use std::io::Write;

use crate::approx::{Ball, Caps, EvalContext, ResourceStats};
use crate::dyadic::Dyadic;
use crate::elementary::{ComplexBall, ComplexDyadic};
use crate::error::{Error, Result};
use crate::reference::{
    oracle_zeta_dirichlet, oracle_zeta_euler_maclaurin, OracleResult,
};
use crate::zeta_complex::zeta_complex_planned;
use crate::zeta_real::zeta_real_planned;
use crate::ApproxReal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Real { s: String },
    Complex { sigma: String, t: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Decimal,
    Hex,
    Json,
}

#[derive(Debug, Clone)]
pub struct Request {
    pub mode: Mode,
    pub bits: u32,
    pub format: OutputFormat,
    pub stats: bool,
    pub verify: bool,
    pub p_override: Option<u32>,
    pub caps: Caps,
    /// Test hook: displaces the computed center before verification so the
    /// mismatch path (exit 5) can be exercised.
    pub corrupt_center: bool,
}

pub fn parse_args(args: &[String]) -> Result<Request> {
    let mut mode: Option<Mode> = None;
    let mut bits: u32 = 64;
    let mut format = OutputFormat::Decimal;
    let mut stats = false;
    let mut verify = false;
    let mut p_override = None;
    let mut caps = Caps::default();
    let mut corrupt_center = false;

    let mut it = args.iter().peekable();
    let next_value = |it: &mut std::iter::Peekable<std::slice::Iter<String>>,
                          flag: &str|
     -> Result<String> {
        it.next()
            .cloned()
            .ok_or_else(|| Error::parse(format!("{flag} requires a value")))
    };
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--real" => {
                if mode.is_some() {
                    return Err(Error::parse("exactly one of --real or --complex"));
                }
                mode = Some(Mode::Real {
                    s: next_value(&mut it, "--real")?,
                });
            }
            "--complex" => {
                if mode.is_some() {
                    return Err(Error::parse("exactly one of --real or --complex"));
                }
                let sigma = next_value(&mut it, "--complex")?;
                let t = next_value(&mut it, "--complex")?;
                mode = Some(Mode::Complex { sigma, t });
            }
            "--bits" => {
                bits = next_value(&mut it, "--bits")?
                    .parse()
                    .map_err(|_| Error::parse("--bits expects a nonnegative integer"))?;
            }
            "--format" => {
                format = match next_value(&mut it, "--format")?.as_str() {
                    "decimal" => OutputFormat::Decimal,
                    "hex" => OutputFormat::Hex,
                    "json" => OutputFormat::Json,
                    other => {
                        return Err(Error::parse(format!(
                            "unknown format {other:?}; expected decimal, hex, or json"
                        )))
                    }
                };
            }
            "--stats" => stats = true,
            "--verify" => verify = true,
            "--p" => {
                p_override = Some(
                    next_value(&mut it, "--p")?
                        .parse()
                        .map_err(|_| Error::parse("--p expects a positive integer"))?,
                );
            }
            "--max-bits" => {
                caps.max_working_bits = next_value(&mut it, "--max-bits")?
                    .parse()
                    .map_err(|_| Error::parse("--max-bits expects an integer"))?;
            }
            "--max-terms" => {
                caps.max_terms = next_value(&mut it, "--max-terms")?
                    .parse()
                    .map_err(|_| Error::parse("--max-terms expects an integer"))?;
            }
            "--test-corrupt-center" => corrupt_center = true,
            other => return Err(Error::parse(format!("unknown argument {other:?}"))),
        }
    }
    let mode = mode.ok_or_else(|| Error::parse("one of --real S or --complex SIGMA T is required"))?;
    Ok(Request {
        mode,
        bits,
        format,
        stats,
        verify,
        p_override,
        caps,
        corrupt_center,
    })
}

/// Decimal digits justified by a binary radius of `2^-n`.
fn justified_digits(n: u32) -> u32 {
    (302 * n as u64).div_ceil(1000) as u32
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse(_) => 2,
        Error::Domain(_) => 3,
        Error::Resource(_) => 4,
        Error::Contract(_) => 4,
    }
}

enum Outcome {
    Real(Ball),
    Complex(ComplexBall),
}

impl Outcome {
    fn radius_exp(&self) -> Option<i64> {
        match self {
            Outcome::Real(b) => b.radius_exp,
            Outcome::Complex(b) => b.radius_exp,
        }
    }
}

/// True iff the oracle enclosure and the computed enclosure intersect;
/// `None` when no oracle covers the requested point.
fn verify_outcome(outcome: &Outcome, req: &Request, n: u32) -> Result<Option<bool>> {
    let oracle_n = n.min(192) + 8;
    match (outcome, &req.mode) {
        (Outcome::Real(ball), Mode::Real { s }) => {
            let sd = Dyadic::from_decimal(s, n + 64)?;
            let oracle = real_oracle(&sd, oracle_n)?;
            match oracle {
                None => Ok(None),
                Some(o) => {
                    let ob = o.real_ball().expect("real oracle produces a real ball");
                    Ok(Some(ball.intersects(&ob)))
                }
            }
        }
        (Outcome::Complex(ball), Mode::Complex { sigma, t }) => {
            let sd = Dyadic::from_decimal(sigma, n + 64)?;
            let td = Dyadic::from_decimal(t, n + 64)?;
            // oracle coverage: sigma >= 1/4 and |t| <= 64
            let quarter = Dyadic::new(1.into(), -2).expect("1/4");
            if sd < quarter || td.abs() > Dyadic::from_int(64) {
                return Ok(None);
            }
            match oracle_zeta_euler_maclaurin(&sd, &td, oracle_n.min(136)) {
                Ok(o) => Ok(Some(ball.intersects(&o.complex_ball()))),
                Err(Error::Resource(_)) | Err(Error::Domain(_)) => Ok(None),
                Err(e) => Err(e),
            }
        }
        _ => Ok(None),
    }
}

/// Dirichlet sum when its term count is feasible, Euler-Maclaurin
/// otherwise; `None` only when neither covers the point.
fn real_oracle(s: &Dyadic, n: u32) -> Result<Option<OracleResult>> {
    match oracle_zeta_dirichlet(s, n) {
        Ok(o) => Ok(Some(o)),
        Err(Error::Resource(_)) | Err(Error::Domain(_)) => {
            match oracle_zeta_euler_maclaurin(s, &Dyadic::zero(), n) {
                Ok(o) => Ok(Some(o)),
                Err(Error::Resource(_)) | Err(Error::Domain(_)) => Ok(None),
                Err(e) => Err(e),
            }
        }
        Err(e) => Err(e),
    }
}

fn json_escape_number(text: &str) -> String {
    // numerals contain no characters needing escapes
    text.to_string()
}

fn stats_json(stats: &ResourceStats) -> String {
    format!(
        "{{\"peak_bits\":{},\"max_working_precision\":{},\"term_count\":{},\"op_count\":{},\"elapsed_ms\":{}}}",
        stats.peak_bits,
        stats.max_working_precision,
        stats.term_count,
        stats.op_count,
        stats.elapsed_ms
    )
}

fn radius_json(radius_exp: Option<i64>) -> String {
    match radius_exp {
        None => "null".to_string(),
        Some(e) => e.to_string(),
    }
}

fn verified_json(v: Option<bool>) -> String {
    match v {
        None => "null".to_string(),
        Some(true) => "true".to_string(),
        Some(false) => "false".to_string(),
    }
}

fn print_result(
    out: &mut impl Write,
    req: &Request,
    outcome: &Outcome,
    verified: Option<bool>,
    stats: &ResourceStats,
) -> std::io::Result<()> {
    let digits = justified_digits(req.bits);
    let radius = outcome.radius_exp();
    match req.format {
        OutputFormat::Decimal => {
            match outcome {
                Outcome::Real(b) => {
                    write!(out, "{}", b.center.to_decimal(digits))?;
                }
                Outcome::Complex(b) => {
                    write!(
                        out,
                        "{} {}i",
                        b.center.re.to_decimal(digits),
                        b.center.im.to_decimal(digits)
                    )?;
                }
            }
            match radius {
                Some(e) => writeln!(out, " \u{00b1} 2^{e}")?,
                None => writeln!(out, " (exact)")?,
            }
            if req.stats {
                print_stats_text(out, stats)?;
            }
        }
        OutputFormat::Hex => {
            match outcome {
                Outcome::Real(b) => writeln!(out, "{}", b.center.to_hex_dyadic())?,
                Outcome::Complex(b) => writeln!(
                    out,
                    "{} | {}",
                    b.center.re.to_hex_dyadic(),
                    b.center.im.to_hex_dyadic()
                )?,
            }
            match radius {
                Some(e) => writeln!(out, "radius_exp {e}")?,
                None => writeln!(out, "radius_exp none")?,
            }
            if req.stats {
                print_stats_text(out, stats)?;
            }
        }
        OutputFormat::Json => {
            let head = match &req.mode {
                Mode::Real { s } => format!(
                    "\"mode\":\"real\",\"s\":\"{}\"",
                    json_escape_number(s)
                ),
                Mode::Complex { sigma, t } => format!(
                    "\"mode\":\"complex\",\"sigma\":\"{}\",\"t\":\"{}\"",
                    json_escape_number(sigma),
                    json_escape_number(t)
                ),
            };
            let (value, value_hex) = match outcome {
                Outcome::Real(b) => (
                    format!("\"{}\"", b.center.to_decimal(digits)),
                    format!("\"{}\"", b.center.to_hex_dyadic()),
                ),
                Outcome::Complex(b) => (
                    format!(
                        "[\"{}\",\"{}\"]",
                        b.center.re.to_decimal(digits),
                        b.center.im.to_decimal(digits)
                    ),
                    format!(
                        "[\"{}\",\"{}\"]",
                        b.center.re.to_hex_dyadic(),
                        b.center.im.to_hex_dyadic()
                    ),
                ),
            };
            writeln!(
                out,
                "{{{head},\"bits\":{},\"value\":{value},\"value_hex\":{value_hex},\"radius_exp\":{},\"verified\":{},\"stats\":{}}}",
                req.bits,
                radius_json(radius),
                verified_json(verified),
                stats_json(stats)
            )?;
        }
    }
    Ok(())
}

fn print_stats_text(out: &mut impl Write, stats: &ResourceStats) -> std::io::Result<()> {
    writeln!(
        out,
        "peak_bits {}\nmax_working_precision {}\nterm_count {}\nop_count {}\nelapsed_ms {}",
        stats.peak_bits,
        stats.max_working_precision,
        stats.term_count,
        stats.op_count,
        stats.elapsed_ms
    )
}

fn evaluate(req: &Request) -> (Result<Outcome>, ResourceStats) {
    let mut ctx = EvalContext::new(req.caps);
    let result = (|| -> Result<Outcome> {
        match &req.mode {
            Mode::Real { s } => {
                let sd = Dyadic::from_decimal(s, req.bits + 64)?;
                let sr = ApproxReal::constant(sd);
                let (mut ball, _plan) =
                    zeta_real_planned(&sr, req.bits, req.p_override, &mut ctx)?;
                if req.corrupt_center {
                    ball.center = ball
                        .center
                        .add(&Dyadic::power_of_two(-(req.bits as i64) + 4)?)?;
                }
                Ok(Outcome::Real(ball))
            }
            Mode::Complex { sigma, t } => {
                let sd = Dyadic::from_decimal(sigma, req.bits + 64)?;
                let td = Dyadic::from_decimal(t, req.bits + 64)?;
                let sr = ApproxReal::constant(sd);
                let tr = ApproxReal::constant(td);
                let (mut ball, _plan) =
                    zeta_complex_planned(&sr, &tr, req.bits, req.p_override, &mut ctx)?;
                if req.corrupt_center {
                    let bump = Dyadic::power_of_two(-(req.bits as i64) + 4)?;
                    ball.center = ComplexDyadic::new(ball.center.re.add(&bump)?, ball.center.im);
                }
                Ok(Outcome::Complex(ball))
            }
        }
    })();
    (result, ctx.finish())
}

/// Runs one request end to end, writing the result to `out` and
/// diagnostics to `err`; returns the process exit code.
pub fn run(args: &[String], out: &mut impl Write, err: &mut impl Write) -> i32 {
    let req = match parse_args(args) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            let _ = writeln!(err, "{USAGE}");
            return 2;
        }
    };
    let (result, stats) = evaluate(&req);
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return exit_code_for(&e);
        }
    };
    let verified = if req.verify {
        match verify_outcome(&outcome, &req, req.bits) {
            Ok(v) => v,
            Err(e) => {
                let _ = writeln!(err, "verification failed to run: {e}");
                return exit_code_for(&e);
            }
        }
    } else {
        None
    };
    if print_result(out, &req, &outcome, verified, &stats).is_err() {
        return 4;
    }
    if verified == Some(false) {
        let _ = writeln!(err, "verification mismatch: oracle and result enclosures are disjoint");
        return 5;
    }
    0
}

const USAGE: &str = "usage: zeta (--real S | --complex SIGMA T) [--bits N] \
[--format decimal|hex|json] [--stats] [--verify] [--p P] [--max-bits B] [--max-terms K]";

#[cfg(test)]
mod tests {
    use super::*;

    fn run_vec(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&args, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn parse_rejects_malformed() {
        assert_eq!(run_vec(&[]).0, 2);
        assert_eq!(run_vec(&["--real"]).0, 2);
        assert_eq!(run_vec(&["--real", "2", "--complex", "1", "2"]).0, 2);
        assert_eq!(run_vec(&["--real", "2", "--bits", "abc"]).0, 2);
        assert_eq!(run_vec(&["--frobnicate"]).0, 2);
        assert_eq!(run_vec(&["--real", "not-a-number", "--bits", "16"]).0, 2);
    }

    #[test]
    fn real_decimal_output() {
        let (code, out, _) = run_vec(&["--real", "2", "--bits", "64"]);
        assert_eq!(code, 0);
        // 20 printed digits; the final digit sits at the radius scale and
        // may truncate either way, so pin only the justified prefix
        assert!(out.starts_with("1.6449340668482264364"), "got {out}");
        assert_eq!(out.split_whitespace().next().unwrap().len(), 22);
        assert!(out.contains("\u{00b1} 2^-"), "radius missing: {out}");
    }

    #[test]
    fn domain_errors_exit_3() {
        let (code, _, err) = run_vec(&["--real", "1", "--bits", "32"]);
        assert_eq!(code, 3);
        assert!(err.contains("pole"), "message should name the pole: {err}");
        let (code, _, _) = run_vec(&["--real", "0.5", "--bits", "32"]);
        assert_eq!(code, 3);
    }

    #[test]
    fn resource_cap_exits_4() {
        let (code, _, _) = run_vec(&["--real", "2", "--bits", "128", "--max-terms", "10"]);
        assert_eq!(code, 4);
        let (code4, _, _) = run_vec(&["--real", "2", "--bits", "4096", "--max-bits", "100"]);
        assert_eq!(code4, 4);
    }

    #[test]
    fn verify_paths() {
        let (code, out, _) = run_vec(&[
            "--real", "2", "--bits", "48", "--verify", "--format", "json",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("\"verified\":true"), "got {out}");
        // corrupted center must mismatch
        let (code, out, err) = run_vec(&[
            "--real",
            "2",
            "--bits",
            "48",
            "--verify",
            "--format",
            "json",
            "--test-corrupt-center",
        ]);
        assert_eq!(code, 5, "out={out} err={err}");
        assert!(out.contains("\"verified\":false"));
        // no oracle coverage: sigma = 0.1
        let (code, out, _) = run_vec(&[
            "--complex", "0.1", "2", "--bits", "24", "--verify", "--format", "json",
        ]);
        assert_eq!(code, 0, "out={out}");
        assert!(out.contains("\"verified\":null"), "got {out}");
    }

    #[test]
    fn json_shape_and_round_trip() {
        let (code, out, _) = run_vec(&["--real", "3", "--bits", "40", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["mode"], "real");
        assert_eq!(v["bits"], 40);
        let digits = v["value"].as_str().unwrap();
        let hexv = v["value_hex"].as_str().unwrap();
        // decimal and hex forms agree within one ulp of the printed digits
        let a = Dyadic::from_decimal(digits, 80).unwrap();
        let b = Dyadic::from_hex_dyadic(hexv).unwrap();
        let gap = a.sub(&b).unwrap().abs();
        let d = justified_digits(40);
        let ulp = Dyadic::from_decimal(&format!("1e-{d}"), 80).unwrap();
        assert!(gap <= ulp.add(&Dyadic::power_of_two(-78).unwrap()).unwrap());
        assert!(v["stats"]["term_count"].as_u64().unwrap() > 0);
        assert!(v["radius_exp"].as_i64().unwrap() <= -40);
    }

    #[test]
    fn complex_json_fields() {
        let (code, out, _) = run_vec(&[
            "--complex", "0.5", "0", "--bits", "32", "--format", "json",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["mode"], "complex");
        assert_eq!(v["sigma"], "0.5");
        assert!(v["value"].as_array().unwrap().len() == 2);
        let re = v["value"][0].as_str().unwrap();
        assert!(re.starts_with("-1.46035450"), "got {re}");
    }

    #[test]
    fn exceptional_point_exits_3_with_name() {
        let (code, _, err) = run_vec(&[
            "--complex",
            "1",
            "9.06472028365438761925536589143",
            "--bits",
            "64",
        ]);
        assert_eq!(code, 3);
        assert!(
            err.contains("exceptional point") && err.contains("ln 2"),
            "diagnostic should name the exceptional point: {err}"
        );
    }

    #[test]
    fn hex_format_round_trips() {
        let (code, out, _) = run_vec(&["--real", "2", "--bits", "24", "--format", "hex"]);
        assert_eq!(code, 0);
        let first = out.lines().next().unwrap();
        let parsed = Dyadic::from_hex_dyadic(first).unwrap();
        let lit = Dyadic::from_decimal("1.6449340668482264", 60).unwrap();
        let gap = parsed.sub(&lit).unwrap().abs();
        assert!(gap <= Dyadic::power_of_two(-23).unwrap());
    }

    #[test]
    fn stats_flag_prints_counters() {
        let (code, out, _) = run_vec(&["--real", "2", "--bits", "24", "--stats"]);
        assert_eq!(code, 0);
        assert!(out.contains("peak_bits"));
        assert!(out.contains("term_count"));
    }
}
