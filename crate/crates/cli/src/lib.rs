//! Command-line front end: expansions, identity suites and finite-field labs.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or configuration error,
//! 3 undecided classification entries.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drinfeld_core::exactfield::{FiniteField, Gf, Poly};
use drinfeld_core::level::{forms_from_level, make_level, TorsionLabel};
use drinfeld_core::moduli::{classify_by_jtilde, jtilde_series, ModuliReport};
use drinfeld_core::report::{Check, SeriesJson, Status, SuiteReport, SCHEMA};
use drinfeld_core::series::{delta_from_h, h_aexpansion, h_product, level_one_ring, SeriesRing};
use drinfeld_core::suites::{default_order, parse_poly, run_suite, SUITES};
use drinfeld_core::torsionlab::{weil_property_suite, WeilLabConfig, WeilLabReport, DEFAULT_K_MAX};
use drinfeld_core::Error;
use serde_json::json;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "drinfeld", version, about = "Exact Drinfeld modular form expansions and identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a truncated expansion.
    Expand(ExpandArgs),
    /// Run an identity suite at (q, N).
    Verify(VerifyArgs),
    /// Run a finite-field lab.
    #[command(subcommand)]
    Lab(Lab),
}

#[derive(Subcommand, Debug)]
pub enum Lab {
    /// Weil pairing properties on random rank-2 modules.
    Weil(WeilArgs),
    /// Classification of pairs (phi, lambda) by j-tilde.
    Moduli(ModuliArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Print the JSON report instead of text.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    HProduct,
    HAexp,
    Delta,
    GLevel,
    #[value(name = "E")]
    E,
    Jtilde,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[arg(long, value_enum)]
    pub form: Form,
    #[arg(long)]
    pub q: u64,
    /// Truncation order; defaults to 2q^2 at level one, min(2q^3, 60) at a level.
    #[arg(long)]
    pub order: Option<i64>,
    /// Degree-one level a for delta, g-level and E (default T).
    #[arg(long)]
    pub level: Option<String>,
    /// Torsion label u1,u2 of E_v.
    #[arg(long)]
    pub v: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    pub suite: String,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub order: Option<i64>,
    /// Degree-one level a (default T).
    #[arg(long)]
    pub level: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct WeilArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: usize,
    /// The level a in F_q[T].
    #[arg(long, default_value = "T")]
    pub a: String,
    /// gamma(T) in F_{q^n}.
    #[arg(long = "gammaT", default_value = "1")]
    pub gamma_t: String,
    #[arg(long, default_value_t = 25)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ModuliArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long = "gammaT", default_value = "1")]
    pub gamma_t: String,
    /// Search in F_{q^(n(q-1)e)}; default e = gcd(2, q-1).
    #[arg(long)]
    pub ext_bound: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

/// What a command produced: the exit code, the JSON report and a text summary.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub json: String,
    pub text: String,
}

/// Configuration problems exit with 2; anything else is a failure.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::NotPrimePower(_)
        | Error::FieldTooLarge(_)
        | Error::UnsupportedLevel(_)
        | Error::Parse(_)
        | Error::InvalidArgument(_)
        | Error::BadLevel(_)
        | Error::IncreaseExtension(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Expand(a) => run_expand(a),
        Command::Verify(a) => run_verify(a),
        Command::Lab(Lab::Weil(a)) => run_weil(a),
        Command::Lab(Lab::Moduli(a)) => run_moduli(a),
    }
}

/// Runs the command, prints the result and returns the exit code.
pub fn main_with(cli: &Cli) -> i32 {
    let out = match &cli.command {
        Command::Expand(a) => &a.output,
        Command::Verify(a) => &a.output,
        Command::Lab(Lab::Weil(a)) => &a.output,
        Command::Lab(Lab::Moduli(a)) => &a.output,
    };
    match run(cli) {
        Ok(o) => {
            if let Some(path) = &out.out {
                if let Err(e) = std::fs::write(path, &o.json) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            print!("{}", if out.json { &o.json } else { &o.text });
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn check_order(order: i64) -> Result<i64, Error> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!("truncation order must be at least 2, got {order}")));
    }
    Ok(order)
}

fn parse_level(fq: &Arc<FiniteField>, level: Option<&str>) -> Result<Poly, Error> {
    level.map_or(Ok(Poly::var()), |s| parse_poly(fq, s))
}

fn parse_label(fq: &Arc<FiniteField>, v: &str) -> Result<TorsionLabel, Error> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!("label {v:?} is not of the form u1,u2")));
    }
    TorsionLabel::new(fq.parse(parts[0].trim())?, fq.parse(parts[1].trim())?)
}

fn series_text<R: drinfeld_core::exactfield::Ring>(sr: &SeriesRing<R>, header: &str, s: &drinfeld_core::series::TruncSeries<R::Elem>) -> String {
    format!("{header}\n{}\n", sr.render(s))
}

pub fn run_expand(args: &ExpandArgs) -> Result<Outcome, Error> {
    let q = args.q;
    let fq = FiniteField::fq(q)?;
    let at_level = matches!(args.form, Form::GLevel | Form::E) || (args.form == Form::Delta && args.level.is_some());
    let order = check_order(args.order.unwrap_or_else(|| {
        let q = q as i64;
        if at_level {
            (2 * q * q * q).min(60)
        } else {
            2 * q * q
        }
    }))?;
    let name = args.form.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let mut meta = json!({ "schema": SCHEMA, "form": name, "q": q, "order": order });
    let header = format!("{name} q={q} order={order}");

    let (series, text) = if at_level {
        let a = parse_level(&fq, args.level.as_deref())?;
        let ctx = make_level(&fq, &a, order)?;
        let sr = ctx.series();
        let field = format!("F_{q}(l), l^{} = -({})", q - 1, ctx.kummer().level_name());
        meta["level"] = json!(ctx.kummer().level_name());
        let s = match args.form {
            Form::E => {
                let v = args.v.as_deref().ok_or_else(|| Error::InvalidArgument("--form E needs --v u1,u2".into()))?;
                let label = parse_label(&fq, v)?;
                meta["v"] = json!(label.render(&fq));
                sr.truncate(&ctx.eisenstein(&label, ctx.work_prec())?, order)
            }
            Form::GLevel => sr.truncate(&forms_from_level(&ctx)?.g, order),
            _ => sr.truncate(&forms_from_level(&ctx)?.delta, order),
        };
        (SeriesJson::new(sr, &s, &field), series_text(sr, &header, &s))
    } else {
        if args.v.is_some() {
            return Err(Error::InvalidArgument("--v applies to --form E only".into()));
        }
        let sr = level_one_ring(&fq);
        let s = match args.form {
            Form::HProduct => h_product(&fq, order)?,
            Form::HAexp => h_aexpansion(&fq, order)?,
            Form::Delta => delta_from_h(&sr, &h_product(&fq, order)?),
            _ => jtilde_series(q, order)?.0,
        };
        let s = sr.truncate(&s, order);
        (SeriesJson::new(&sr, &s, &format!("F_{q}(T)")), series_text(&sr, &header, &s))
    };
    meta["series"] = serde_json::to_value(&series).expect("series serialize");
    Ok(Outcome { code: EXIT_PASS, json: to_json(&meta), text })
}

fn check_line(c: &Check) -> String {
    let status = match c.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Undecided => "UNDECIDED",
        Status::Recorded => "RECORDED",
    };
    let mut line = format!("{status:<9} {}", c.name);
    if let Some(p) = c.compared_to {
        let _ = write!(line, "  mod t^{p}");
    }
    if let Some(e) = c.first_mismatch.filter(|_| c.status != Status::Pass) {
        let _ = write!(line, "  first mismatch at exponent {e}");
    }
    for (k, v) in &c.fitted {
        let _ = write!(line, "  {k} = {v}");
    }
    if let Some(n) = &c.note {
        let _ = write!(line, "  ({n})");
    }
    line.push('\n');
    line
}

fn verdict(checks: &[Check], undecided: bool) -> i32 {
    if checks.iter().any(|c| c.failed()) {
        EXIT_FAIL
    } else if undecided {
        EXIT_UNDECIDED
    } else {
        EXIT_PASS
    }
}

fn verdict_word(code: i32) -> &'static str {
    match code {
        EXIT_PASS => "PASS",
        EXIT_UNDECIDED => "UNDECIDED",
        _ => "FAIL",
    }
}

pub fn run_verify(args: &VerifyArgs) -> Result<Outcome, Error> {
    let fq = FiniteField::fq(args.q)?;
    let level = args.level.as_deref().map(|s| parse_poly(&fq, s)).transpose()?;
    let order = check_order(args.order.unwrap_or_else(|| default_order(&args.suite, args.q, level.is_some())))?;
    let report = run_suite(&args.suite, args.q, order, level.as_ref())?;
    Ok(suite_outcome(&report))
}

pub fn suite_outcome(report: &SuiteReport) -> Outcome {
    let code = verdict(&report.checks, report.undecided());
    let mut text = format!("suite {} q={} order={}", report.suite, report.q, report.order);
    if let Some(l) = &report.level {
        let _ = write!(text, " level={l}");
    }
    text.push('\n');
    report.checks.iter().for_each(|c| text.push_str(&check_line(c)));
    let _ = writeln!(text, "{}", verdict_word(code));
    Outcome { code, json: to_json(report), text }
}

pub fn run_weil(args: &WeilArgs) -> Result<Outcome, Error> {
    let fq = FiniteField::fq(args.q)?;
    let level = parse_poly(&fq, &args.a)?;
    let big = drinfeld_core::exactfield::make_extension(args.q, args.n)?;
    let gamma_t = big.parse(&args.gamma_t)?;
    let cfg = WeilLabConfig {
        q: args.q,
        n: args.n,
        gamma_t,
        level,
        trials: args.trials,
        seed: args.seed,
        k_max: args.k_max,
    };
    let report = weil_property_suite(&cfg)?;
    Ok(weil_outcome(&report))
}

pub fn weil_outcome(r: &WeilLabReport) -> Outcome {
    let code = verdict(&r.checks, false);
    let mut text = format!(
        "lab weil q={} n={} gammaT={} a={} seed={} trials={} (unsplit redrawn: {})\n",
        r.q, r.n, r.gamma_t, r.level, r.seed, r.trials, r.skipped_unsplit
    );
    r.checks.iter().for_each(|c| text.push_str(&check_line(c)));
    let _ = writeln!(text, "{}", verdict_word(code));
    Outcome { code, json: to_json(r), text }
}

pub fn run_moduli(args: &ModuliArgs) -> Result<Outcome, Error> {
    if args.q < 2 {
        return Err(Error::NotPrimePower(args.q));
    }
    let big = drinfeld_core::exactfield::make_extension(args.q, args.n)?;
    let gamma_t: Gf = big.parse(&args.gamma_t)?;
    let e = args.ext_bound.unwrap_or(if args.q % 2 == 1 { 2 } else { 1 });
    let report = classify_by_jtilde(args.q, args.n, gamma_t, e)?;
    Ok(moduli_outcome(&report))
}

pub fn moduli_outcome(r: &ModuliReport) -> Outcome {
    let code = verdict(&r.checks, !r.undecided.is_empty());
    let mut text = format!(
        "lab moduli q={} n={} gammaT={} search field {} ({} pairs, {} classes)\n",
        r.q, r.n, r.gamma_t, r.search_field, r.pairs, r.class_count
    );
    let _ = writeln!(text, "{:<16} {:<16} {:>5}  representative", "jtilde", "j", "size");
    for c in &r.classes {
        let _ = writeln!(text, "{:<16} {:<16} {:>5}  {}", c.jtilde, c.j, c.size, c.representative);
    }
    if !r.undecided.is_empty() {
        let _ = writeln!(text, "{} undecided", r.undecided.len());
    }
    r.checks.iter().for_each(|c| text.push_str(&check_line(c)));
    let _ = writeln!(text, "{}", verdict_word(code));
    Outcome { code, json: to_json(r), text }
}
