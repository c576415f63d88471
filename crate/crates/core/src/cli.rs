//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cantor;
use crate::error::Error;
use crate::export::{chain_csv, chain_json, staircase_csv, trace_csv, trace_json};
use crate::expr;
use crate::inequalities::{self, IneqReport};
use crate::polyop::{self, Poly};
use crate::realfn::{catalog_lookup, Fn1D, Interval};
use crate::scalar::{parse_rational, NumericMode, Rational, Scalar};
use crate::slope::{self, ProbeConfig, SlopeProbeReport};
use crate::theoremgraph::{build_graph, Statement};
use crate::witness::{self, BisectionTrace, EpsilonChain, ExtremumParams, HalvingRule, Orientation, Witness};

pub const DEFAULT_SEED: u64 = 20080;

#[derive(Debug, Parser)]
#[command(name = "fincr", version, about = "Certificates for finite-increment theorems")]
pub struct Cli {
    /// Seed for every randomized sampling step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct FnSpec {
    /// Function as an expression in `x`, e.g. "x^2*sin(1/x)".
    #[arg(long = "fn", value_name = "EXPR")]
    pub expr: Option<String>,
    /// Catalog function name (identity, affine, monomial, poly, sin, fpq, cantor).
    #[arg(long, value_name = "NAME")]
    pub catalog: Option<String>,
    /// Comma-separated catalog parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "P,..")]
    pub params: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[command(flatten)]
    pub function: FnSpec,
    /// Interval endpoints; `p/q` and constant expressions such as `pi/2` are accepted.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub interval: Option<Vec<String>>,
    /// Run in exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    LeftFirst,
    MaxIncrement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Want {
    Positive,
    Negative,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dichotomy witness for f(a) != f(b).
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = Rule::LeftFirst)]
        rule: Rule,
    },
    /// Oriented dichotomy witness.
    Lagrange {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Want::Positive)]
        want: Want,
        #[arg(long, default_value_t = 20)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = Rule::LeftFirst)]
        rule: Rule,
    },
    /// Counter-certificate to sup |f'| <= k.
    RefuteIaf {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, default_value_t = 40)]
        levels: usize,
    },
    /// Greedy epsilon-chain certifying f(b) - f(a) <= (M + eps)(b - a).
    Chain {
        #[command(flatten)]
        common: Common,
        #[arg(long = "M", allow_hyphen_values = true)]
        big_m: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value = "1e-9")]
        min_step: String,
        /// Bound |P| instead of P.
        #[arg(long)]
        abs: bool,
    },
    /// Rolle point of a function with equal endpoint values.
    Rolle {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        extremum: ExtremumArgs,
    },
    /// Mean-value point.
    Mvt {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        extremum: ExtremumArgs,
    },
    /// Point where f' takes an intermediate value.
    Darboux {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value_t = 200)]
        bisect_levels: usize,
        #[command(flatten)]
        extremum: ExtremumArgs,
    },
    /// Slope P(x, y), a straddling slope limit at --at, or the x^2 sin(1/x) counterexample pair.
    Slope {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true, requires = "y")]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["x", "counterexample"])]
        at: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        h0: f64,
        #[arg(long, default_value_t = 10)]
        levels: usize,
        #[arg(long, conflicts_with = "x")]
        counterexample: Option<u64>,
    },
    /// Strict-differentiability probe over unrestricted pairs.
    StrictProbe {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 0.1)]
        h0: f64,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Draw base points at random (seeded) instead of on a grid.
        #[arg(long)]
        jitter: bool,
    },
    /// |f(b) - f(a)| <= k (b - a).
    CheckIaf {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
    },
    /// m (b - a) <= f(b) - f(a) <= M (b - a).
    CheckIafp {
        #[command(flatten)]
        common: Common,
        #[arg(long = "m", allow_hyphen_values = true)]
        m: String,
        #[arg(long = "M", allow_hyphen_values = true)]
        big_m: String,
    },
    /// |f(b) - f(a)| <= g(b) - g(a).
    CheckIafg {
        #[command(flatten)]
        common: Common,
        /// Comparison function as an expression.
        #[arg(long = "g", value_name = "EXPR")]
        g_expr: Option<String>,
        #[arg(long, value_name = "NAME")]
        g_catalog: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        g_params: Vec<String>,
    },
    /// f(b) - f(a) <= M (b - a).
    CheckMaja {
        #[command(flatten)]
        common: Common,
        #[arg(long = "M", allow_hyphen_values = true)]
        big_m: String,
    },
    /// Samples of the level-n staircase on a uniform grid of [0, 1].
    Staircase {
        /// Level; defaults to the smallest level within --tol of the limit.
        #[arg(long, conflicts_with = "tol")]
        level: Option<u32>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        out: Output,
    },
    /// The pieces of K_n (and optionally its gaps).
    CantorIntervals {
        #[arg(long)]
        level: u32,
        #[arg(long)]
        gaps: bool,
        #[command(flatten)]
        out: Output,
    },
    /// The derivative operator on polynomials of degree <= n.
    Polyop {
        #[arg(long)]
        n: usize,
        /// Ascending coefficients of a polynomial to test for a primitive.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        poly: Option<Vec<String>>,
        #[command(flatten)]
        out: Output,
    },
    /// The implication graph between the statements.
    Graph {
        /// Query reachability FROM -> TO.
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
        implies: Option<Vec<String>>,
        /// Emit the graph in DOT format.
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ExtremumArgs {
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
    #[arg(long, default_value_t = 60)]
    pub refine: usize,
}

impl From<ExtremumArgs> for ExtremumParams {
    fn from(a: ExtremumArgs) -> Self {
        ExtremumParams { grid: a.grid, refine_levels: a.refine }
    }
}

/// Failure modes of a run, mapped to exit codes 2 and 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failed(e)
    }
}

fn usage(flag: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{flag}: {e}"))
}

/// Rendered artifact and exit status (0, or 1 for a failed check).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub body: String,
    pub status: i32,
    pub output: Option<PathBuf>,
}

fn ok(body: String, out: &Output) -> Outcome {
    Outcome { body, status: 0, output: out.output.clone() }
}

fn parse_value<T: Scalar>(flag: &str, text: &str) -> Result<T, CliError> {
    let err = |e: &dyn std::fmt::Display| usage(flag, format!("cannot read `{text}` as a number ({e})"));
    match T::MODE {
        NumericMode::Float64 => {
            let x = match text.trim().parse::<f64>() {
                Ok(x) => x,
                Err(_) => {
                    if text.contains('x') {
                        return Err(err(&"constant expected"));
                    }
                    expr::parse(text).and_then(|e| e.eval_f64(0.0)).map_err(|e| err(&e))?
                }
            };
            T::from_f64(x).ok_or_else(|| err(&"not finite"))
        }
        NumericMode::ExactRational => {
            let q = parse_rational(text).map_err(|e| err(&e))?;
            Ok(T::from_rational(&q))
        }
    }
}

fn build_fn(flag: &str, expr_text: Option<&str>, name: Option<&str>, params: &[String]) -> Result<Fn1D, CliError> {
    match (expr_text, name) {
        (Some(text), None) => {
            if !params.is_empty() {
                return Err(usage("--params", "only valid with a catalog function"));
            }
            expr::parse_fn(text, Interval::real_line()).map_err(|e| usage(flag, e))
        }
        (None, Some(name)) => {
            let params = params
                .iter()
                .map(|p| parse_rational(p))
                .collect::<Result<Vec<Rational>, _>>()
                .map_err(|e| usage("--params", e))?;
            catalog_lookup(name, &params).map_err(|e| usage("--catalog", e))
        }
        (Some(_), Some(_)) => Err(usage(flag, "give either an expression or a catalog name, not both")),
        (None, None) => Err(usage(flag, "a function is required (expression or catalog name)")),
    }
}

struct Setup {
    f: Fn1D,
    interval: Vec<String>,
}

fn setup(common: &Common) -> Result<Setup, CliError> {
    let spec = &common.function;
    let f = build_fn("--fn", spec.expr.as_deref(), spec.catalog.as_deref(), &spec.params)?;
    let interval = match &common.interval {
        Some(v) => v.clone(),
        None if f.domain().lo().is_finite() && f.domain().hi().is_finite() => {
            vec![f.domain().lo().to_string(), f.domain().hi().to_string()]
        }
        None => return Err(usage("--interval", "required for functions defined on the whole line")),
    };
    Ok(Setup { f, interval })
}

fn interval<T: Scalar>(s: &Setup) -> Result<Interval<T>, CliError> {
    let lo = parse_value::<T>("--interval", &s.interval[0])?;
    let hi = parse_value::<T>("--interval", &s.interval[1])?;
    Interval::new(lo, hi).map_err(|e| usage("--interval", e))
}

fn float_only(common: &Common, command: &str) -> Result<(), CliError> {
    if common.exact {
        Err(usage("--exact", format!("`{command}` runs in floating point only")))
    } else {
        Ok(())
    }
}

fn halving(rule: Rule) -> HalvingRule {
    match rule {
        Rule::LeftFirst => HalvingRule::LeftFirst,
        Rule::MaxIncrement => HalvingRule::MaxIncrement,
    }
}

fn header(f: &Fn1D, iv: &impl std::fmt::Display) -> String {
    format!("function: {}\ninterval: {}\n", f.name(), iv)
}

fn render_trace<T: Scalar>(f: &Fn1D, iv: &Interval<T>, trace: &BisectionTrace<T>, format: Format) -> String {
    match format {
        Format::Csv => trace_csv(trace),
        Format::Json => {
            let mut v = trace_json(trace);
            v["function"] = json!(f.name());
            pretty(&v)
        }
        Format::Text => {
            let mut s = header(f, iv);
            let _ = writeln!(s, "rule: {:?}", trace.rule);
            let _ = writeln!(s, "levels: {}", trace.levels);
            let _ = writeln!(s, "d: {}", trace.d);
            let _ = writeln!(s, "slope floor d/(b-a): {}", trace.slope_floor());
            let (an, bn) = (trace.a_seq.last().unwrap(), trace.b_seq.last().unwrap());
            let _ = writeln!(s, "final interval: [{an}, {bn}]");
            let _ = writeln!(s, "c: {}", trace.c);
            let _ = writeln!(s, "stationary: {:?}", trace.stationary);
            if let Some(chk) = &trace.deriv_check {
                let _ = writeln!(
                    s,
                    "f'(c) = {} against floor {} (tol {:e}): {}",
                    chk.deriv_at_c,
                    chk.floor,
                    chk.tolerance,
                    if chk.passed { "ok" } else { "FAILED" }
                );
            }
            s
        }
    }
}

fn render_chain<T: Scalar>(f: &Fn1D, iv: &Interval<T>, chain: &EpsilonChain<T>, format: Format) -> String {
    match format {
        Format::Csv => chain_csv(chain),
        Format::Json => {
            let mut v = chain_json(chain);
            v["function"] = json!(f.name());
            pretty(&v)
        }
        Format::Text => {
            let mut s = header(f, iv);
            let _ = writeln!(s, "steps: {}", chain.step_slopes.len());
            let _ = writeln!(s, "rise f(b)-f(a): {}", chain.rise());
            let _ = writeln!(s, "certified bound (M+eps)(b-a): {}", chain.certified_bound());
            let _ = writeln!(s, "certificate: {}", if chain.certifies() { "valid" } else { "INVALID" });
            s
        }
    }
}

fn render_witness(f: &Fn1D, iv: &Interval, w: &Witness, extra: Option<Value>, format: Format) -> String {
    let mut v = serde_json::to_value(w).expect("witness serializes");
    v["function"] = json!(f.name());
    v["interval"] = json!([iv.lo(), iv.hi()]);
    if let Some(Value::Object(extra)) = extra {
        for (k, x) in extra {
            v[k] = x;
        }
    }
    match format {
        Format::Json => pretty(&v),
        Format::Csv => csv_one(
            &["c", "target_slope", "deriv_at_c", "residual", "tolerance"],
            vec![
                w.c.to_string(),
                w.target_slope.to_string(),
                opt(w.deriv_at_c),
                opt(w.residual),
                opt(w.tolerance),
            ],
        ),
        Format::Text => {
            let mut s = header(f, iv);
            let _ = writeln!(s, "c: {}", w.c);
            let _ = writeln!(s, "target slope: {}", w.target_slope);
            if let (Some(d), Some(r), Some(t)) = (w.deriv_at_c, w.residual, w.tolerance) {
                let _ = writeln!(s, "f'(c): {d}\nresidual: {r:e} (tolerance {t:e})");
            }
            if w.constant_on_grid {
                let _ = writeln!(s, "function is constant on the grid; midpoint returned");
            }
            s
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_one(header: &[&str], row: Vec<String>) -> String {
    csv_rows(header, vec![row])
}

fn csv_rows(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("utf-8")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn render_report<T: Scalar>(f: &Fn1D, iv: &Interval<T>, label: &str, r: &IneqReport<T>, out: &Output) -> Outcome {
    let body = match out.format {
        Format::Json => {
            let mut v = r.to_json();
            v["function"] = json!(f.name());
            v["check"] = json!(label);
            pretty(&v)
        }
        Format::Csv => csv_one(
            &["holds", "lhs", "rhs", "margin"],
            vec![r.holds.to_string(), r.lhs.to_string(), r.rhs.to_string(), r.margin.to_string()],
        ),
        Format::Text => {
            let mut s = header(f, iv);
            let _ = writeln!(s, "{label}: {}", if r.holds { "holds" } else { "FAILS" });
            let _ = writeln!(s, "lhs: {}\nrhs: {}\nmargin: {}", r.lhs, r.rhs, r.margin);
            if let Some(trace) = &r.counter_witness {
                let _ = writeln!(
                    s,
                    "counter-witness: {} levels, every |slope| >= {}, c = {}",
                    trace.levels,
                    trace.slope_floor().abs(),
                    trace.c
                );
            }
            s
        }
    };
    Outcome { body, status: if r.holds { 0 } else { 1 }, output: out.output.clone() }
}

fn render_probe(f: &Fn1D, r: &SlopeProbeReport, format: Format) -> String {
    let mut v = serde_json::to_value(r).expect("report serializes");
    v["function"] = json!(f.name());
    match format {
        Format::Json => pretty(&v),
        Format::Csv => csv_rows(
            &["level", "dispersion"],
            r.level_dispersions.iter().enumerate().map(|(i, d)| vec![i.to_string(), d.to_string()]).collect(),
        ),
        Format::Text => {
            let mut s = format!("function: {}\n", f.name());
            let _ = writeln!(s, "estimate: {}\ndispersion: {:e}", r.estimate, r.dispersion);
            if let (Some((x, y)), Some(p)) = (r.adversarial_pair, r.adversarial_slope) {
                let _ = writeln!(s, "adversarial pair: ({x:e}, {y:e}) with slope {p}");
            }
            let _ = writeln!(s, "verdict (heuristic): {:?}", r.verdict);
            s
        }
    }
}

macro_rules! by_mode {
    ($exact:expr, $f:ident ( $($arg:expr),* )) => {
        if $exact { $f::<Rational>($($arg),*) } else { $f::<f64>($($arg),*) }
    };
}

fn cmd_witness<T: Scalar>(
    common: &Common,
    levels: usize,
    rule: Rule,
    want: Option<Want>,
) -> Result<Outcome, CliError> {
    let s = setup(common)?;
    let iv = interval::<T>(&s)?;
    let trace = match want {
        None => witness::fcd_witness_with_rule(&s.f, &iv, levels, halving(rule))?,
        Some(w) => {
            let o = if w == Want::Positive { Orientation::Positive } else { Orientation::Negative };
            witness::lagrange_witness_with_rule(&s.f, &iv, o, levels, halving(rule))?
        }
    };
    Ok(ok(render_trace(&s.f, &iv, &trace, common.out.format), &common.out))
}

fn cmd_refute<T: Scalar>(common: &Common, k: &str, levels: usize) -> Result<Outcome, CliError> {
    let s = setup(common)?;
    let iv = interval::<T>(&s)?;
    let k = parse_value::<T>("--k", k)?;
    match witness::iaf_refute(&s.f, &iv, &k, levels)? {
        Some(trace) => Ok(ok(render_trace(&s.f, &iv, &trace, common.out.format), &common.out)),
        None => {
            let body = match common.out.format {
                Format::Json => pretty(&json!({ "function": s.f.name(), "refuted": false })),
                Format::Csv => trace_header_only(),
                Format::Text => format!("{}not refutable from the endpoints: |f(b)-f(a)| <= k(b-a)\n", header(&s.f, &iv)),
            };
            Ok(ok(body, &common.out))
        }
    }
}

fn trace_header_only() -> String {
    csv_rows(&crate::export::TRACE_HEADER, Vec::new())
}

fn cmd_chain<T: Scalar>(common: &Common, m: &str, eps: &str, min_step: &str, abs: bool) -> Result<Outcome, CliError> {
    let s = setup(common)?;
    let iv = interval::<T>(&s)?;
    let m = parse_value::<T>("--M", m)?;
    let eps = parse_value::<T>("--eps", eps)?;
    let min_step = parse_value::<T>("--min-step", min_step)?;
    let chain = if abs {
        witness::epsilon_chain_abs(&s.f, &iv, &m, &eps, &min_step)?
    } else {
        witness::epsilon_chain(&s.f, &iv, &m, &eps, &min_step)?
    };
    Ok(ok(render_chain(&s.f, &iv, &chain, common.out.format), &common.out))
}

fn cmd_slope<T: Scalar>(common: &Common, x: &str, y: &str) -> Result<Outcome, CliError> {
    let s = setup_no_interval(common)?;
    let (xv, yv) = (parse_value::<T>("--x", x)?, parse_value::<T>("--y", y)?);
    let p = slope::slope(&s, &xv, &yv)?;
    let body = match common.out.format {
        Format::Json => pretty(&json!({ "function": s.name(), "x": xv.to_json(), "y": yv.to_json(), "slope": p.to_json() })),
        Format::Csv => csv_one(&["x", "y", "slope"], vec![xv.to_string(), yv.to_string(), p.to_string()]),
        Format::Text => format!("P({xv}, {yv}) = {p}\n"),
    };
    Ok(ok(body, &common.out))
}

fn setup_no_interval(common: &Common) -> Result<Fn1D, CliError> {
    let spec = &common.function;
    build_fn("--fn", spec.expr.as_deref(), spec.catalog.as_deref(), &spec.params)
}

fn cmd_check<T: Scalar>(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::CheckIaf { common, k } => {
            let s = setup(common)?;
            let iv = interval::<T>(&s)?;
            let k = parse_value::<T>("--k", k)?;
            let r = inequalities::check_iaf(&s.f, &iv, &k)?;
            Ok(render_report(&s.f, &iv, "|f(b)-f(a)| <= k(b-a)", &r, &common.out))
        }
        Command::CheckIafp { common, m, big_m } => {
            let s = setup(common)?;
            let iv = interval::<T>(&s)?;
            let (m, big_m) = (parse_value::<T>("--m", m)?, parse_value::<T>("--M", big_m)?);
            let r = inequalities::check_iafprime(&s.f, &iv, &m, &big_m)?;
            Ok(render_report(&s.f, &iv, "m(b-a) <= f(b)-f(a) <= M(b-a)", &r, &common.out))
        }
        Command::CheckIafg { common, g_expr, g_catalog, g_params } => {
            let s = setup(common)?;
            let g = build_fn("--g", g_expr.as_deref(), g_catalog.as_deref(), g_params)?;
            let iv = interval::<T>(&s)?;
            let r = inequalities::check_iafg(&s.f, &g, &iv)?;
            Ok(render_report(&s.f, &iv, &format!("|f(b)-f(a)| <= g(b)-g(a) with g = {}", g.name()), &r, &common.out))
        }
        Command::CheckMaja { common, big_m } => {
            let s = setup(common)?;
            let iv = interval::<T>(&s)?;
            let big_m = parse_value::<T>("--M", big_m)?;
            let r = inequalities::check_maja(&s.f, &iv, &big_m)?;
            Ok(render_report(&s.f, &iv, "f(b)-f(a) <= M(b-a)", &r, &common.out))
        }
        _ => unreachable!("not a check command"),
    }
}

fn cmd_staircase<T: Scalar>(level: Option<u32>, tol: f64, grid: usize, out: &Output) -> Result<Outcome, CliError> {
    if grid < 2 {
        return Err(usage("--grid", "need at least 2 points"));
    }
    let n = match level {
        Some(n) => n,
        None => cantor::level_for_tolerance(tol).map_err(|e| usage("--tol", e))?,
    };
    let last = T::from_i64(grid as i64 - 1);
    let points = (0..grid)
        .map(|i| {
            let x = if i + 1 == grid { T::one() } else { T::from_i64(i as i64) / last.clone() };
            cantor::staircase_eval(n, &x).map(|y| (x, y))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let body = match out.format {
        Format::Csv => staircase_csv(&points),
        Format::Json => pretty(&json!({
            "level": n,
            "x": points.iter().map(|p| p.0.to_json()).collect::<Vec<_>>(),
            "f": points.iter().map(|p| p.1.to_json()).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut s = format!("level {n}, {grid} points\n");
            for (x, y) in &points {
                let _ = writeln!(s, "{x}\t{y}");
            }
            s
        }
    };
    Ok(ok(body, out))
}

fn cmd_cantor_intervals(n: u32, gaps: bool, out: &Output) -> Result<Outcome, CliError> {
    let level = cantor::kn_intervals(n).map_err(|e| usage("--level", e))?;
    let pieces: Vec<Vec<String>> = level
        .pieces()
        .enumerate()
        .map(|(i, p)| vec![i.to_string(), p.lo().to_string(), p.hi().to_string()])
        .collect();
    let plateaus: Vec<Vec<String>> = if gaps {
        level
            .plateaus()
            .enumerate()
            .map(|(i, g)| vec![i.to_string(), g.lo.to_string(), g.hi.to_string(), g.value.to_string()])
            .collect()
    } else {
        Vec::new()
    };
    let body = match out.format {
        Format::Csv if gaps => csv_rows(&["i", "lo", "hi", "value"], plateaus),
        Format::Csv => csv_rows(&["i", "lo", "hi"], pieces),
        Format::Json => {
            let mut v = json!({
                "level": n,
                "slope": level.slope().to_string(),
                "pieces": pieces.iter().map(|r| json!([r[1], r[2]])).collect::<Vec<_>>(),
            });
            if gaps {
                v["gaps"] = plateaus.iter().map(|r| json!({"lo": r[1], "hi": r[2], "value": r[3]})).collect();
            }
            pretty(&v)
        }
        Format::Text => {
            let mut s = format!("K_{n}: {} pieces of width 1/3^{n}, slope {}\n", pieces.len(), level.slope());
            for r in &pieces {
                let _ = writeln!(s, "[{}, {}]", r[1], r[2]);
            }
            for r in &plateaus {
                let _ = writeln!(s, "gap ({}, {}): f = {}", r[1], r[2], r[3]);
            }
            s
        }
    };
    Ok(ok(body, out))
}

fn cmd_polyop(n: usize, poly: Option<&[String]>, out: &Output) -> Result<Outcome, CliError> {
    let m = polyop::d_matrix(n);
    let rank = polyop::rank(&m);
    let kernel = polyop::kernel_basis(n);
    let query = match poly {
        Some(coeffs) => {
            let coeffs = coeffs
                .iter()
                .map(|c| parse_rational(c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| usage("--poly", e))?;
            let p = Poly::new(coeffs);
            let q = polyop::has_primitive(&p, n).map_err(|e| usage("--poly", e))?;
            Some((p, q))
        }
        None => None,
    };
    let matrix_rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    let body = match out.format {
        Format::Csv => {
            let header: Vec<String> = (0..=n).map(|j| format!("x^{j}")).collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            csv_rows(&header, matrix_rows)
        }
        Format::Json => {
            let mut v = json!({
                "n": n,
                "matrix": matrix_rows,
                "rank": rank,
                "kernel_dim": kernel.len(),
                "kernel": kernel.iter().map(ToString::to_string).collect::<Vec<_>>(),
            });
            if let Some((p, q)) = &query {
                v["poly"] = json!(p.to_string());
                v["has_primitive"] = json!(q.exists);
                v["primitive"] = json!(q.primitive.as_ref().map(ToString::to_string));
            }
            pretty(&v)
        }
        Format::Text => {
            let mut s = format!("D on polynomials of degree <= {n}\n");
            for r in &matrix_rows {
                let _ = writeln!(s, "  [{}]", r.join(", "));
            }
            let _ = writeln!(s, "rank: {rank}\nkernel dimension: {}", kernel.len());
            let _ = writeln!(s, "rank + kernel dimension = {}", rank + kernel.len());
            for k in &kernel {
                let _ = writeln!(s, "kernel basis: {k}");
            }
            if let Some((p, q)) = &query {
                match &q.primitive {
                    Some(prim) => {
                        let _ = writeln!(s, "primitive of {p}: {prim}");
                    }
                    None => {
                        let _ = writeln!(s, "{p} has no primitive of degree <= {n}");
                    }
                }
            }
            s
        }
    };
    Ok(ok(body, out))
}

fn cmd_graph(implies: Option<&[String]>, dot: bool, out: &Output) -> Result<Outcome, CliError> {
    let g = build_graph();
    if dot {
        return Ok(ok(g.to_dot(), out));
    }
    if let Some(pair) = implies {
        let from: Statement = pair[0].parse().map_err(|e| usage("--implies", e))?;
        let to: Statement = pair[1].parse().map_err(|e| usage("--implies", e))?;
        let answer = g.implies(from, to);
        let body = match out.format {
            Format::Json => pretty(&json!({ "from": from.id(), "to": to.id(), "implies": answer })),
            Format::Csv => csv_one(&["from", "to", "implies"], vec![from.id().into(), to.id().into(), answer.to_string()]),
            Format::Text => format!("{from} => {to}: {answer}\n"),
        };
        return Ok(ok(body, out));
    }
    let classes = g.equivalence_classes();
    let edges = g.edges();
    let body = match out.format {
        Format::Csv => csv_rows(
            &["from", "to", "source"],
            edges.iter().map(|e| vec![e.from.id().into(), e.to.id().into(), e.source.into()]).collect(),
        ),
        Format::Json => pretty(&json!({
            "statements": Statement::ALL.iter().map(|s| json!({"id": s.id(), "note": s.note()})).collect::<Vec<_>>(),
            "edges": edges.iter().map(|e| json!({"from": e.from.id(), "to": e.to.id(), "source": e.source})).collect::<Vec<_>>(),
            "classes": classes.iter().map(|c| c.iter().map(|s| s.id()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut s = String::new();
            for e in &edges {
                let _ = writeln!(s, "{} => {}  [{}]", e.from, e.to, e.source);
            }
            s.push_str("equivalence classes:\n");
            for c in &classes {
                let ids: Vec<_> = c.iter().map(|s| s.id()).collect();
                let _ = writeln!(s, "  {{{}}}", ids.join(", "));
            }
            s
        }
    };
    Ok(ok(body, out))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Witness { common, levels, rule } => {
            by_mode!(common.exact, cmd_witness(common, *levels, *rule, None))
        }
        Command::Lagrange { common, want, levels, rule } => {
            by_mode!(common.exact, cmd_witness(common, *levels, *rule, Some(*want)))
        }
        Command::RefuteIaf { common, k, levels } => by_mode!(common.exact, cmd_refute(common, k, *levels)),
        Command::Chain { common, big_m, eps, min_step, abs } => {
            by_mode!(common.exact, cmd_chain(common, big_m, eps, min_step, *abs))
        }
        Command::Rolle { common, extremum } => {
            float_only(common, "rolle")?;
            let s = setup(common)?;
            let iv = interval::<f64>(&s)?;
            let w = witness::rolle_witness_with(&s.f, &iv, (*extremum).into())?;
            Ok(ok(render_witness(&s.f, &iv, &w, None, common.out.format), &common.out))
        }
        Command::Mvt { common, extremum } => {
            float_only(common, "mvt")?;
            let s = setup(common)?;
            let iv = interval::<f64>(&s)?;
            let w = witness::mvt_witness_with(&s.f, &iv, (*extremum).into())?;
            Ok(ok(render_witness(&s.f, &iv, &w, None, common.out.format), &common.out))
        }
        Command::Darboux { common, v, bisect_levels, extremum } => {
            float_only(common, "darboux")?;
            let s = setup(common)?;
            let iv = interval::<f64>(&s)?;
            let v = parse_value::<f64>("--v", v)?;
            let d = witness::darboux_witness_with(&s.f, &iv, v, *bisect_levels, (*extremum).into())?;
            let extra = json!({ "bracket": [d.bracket.0, d.bracket.1], "branch": d.branch, "x": d.x });
            Ok(ok(render_witness(&s.f, &iv, &d.witness, Some(extra), common.out.format), &common.out))
        }
        Command::Slope { common, x, y, at, h0, levels, counterexample } => {
            if let Some(n) = counterexample {
                let c = slope::counterexample_slopes(*n);
                let body = match common.out.format {
                    Format::Json => pretty(&serde_json::to_value(c).expect("serializes")),
                    Format::Csv => csv_one(
                        &["n", "x", "y", "slope"],
                        vec![c.n.to_string(), c.x.to_string(), c.y.to_string(), c.slope.to_string()],
                    ),
                    Format::Text => format!("n = {}: P({}, {}) = {}\n", c.n, c.x, c.y, c.slope),
                };
                return Ok(ok(body, &common.out));
            }
            if let Some(a) = at {
                float_only(common, "slope --at")?;
                let f = setup_no_interval(common)?;
                let a = parse_value::<f64>("--at", a)?;
                let r = slope::two_sided_slope_limit(&f, a, *h0, *levels)?;
                return Ok(ok(render_probe(&f, &r, common.out.format), &common.out));
            }
            match (x, y) {
                (Some(x), Some(y)) => by_mode!(common.exact, cmd_slope(common, x, y)),
                _ => Err(usage("--x/--y", "give --x and --y, --at, or --counterexample")),
            }
        }
        Command::StrictProbe { common, a, h0, levels, samples, jitter } => {
            float_only(common, "strict-probe")?;
            let f = setup_no_interval(common)?;
            let config = ProbeConfig { jitter_seed: jitter.then_some(cli.seed), ..ProbeConfig::default() };
            let r = slope::strict_deriv_probe_with(&f, *a, *h0, *levels, *samples, &config)?;
            Ok(ok(render_probe(&f, &r, common.out.format), &common.out))
        }
        Command::CheckIaf { common, .. }
        | Command::CheckIafp { common, .. }
        | Command::CheckIafg { common, .. }
        | Command::CheckMaja { common, .. } => {
            if common.exact {
                cmd_check::<Rational>(&cli.command)
            } else {
                cmd_check::<f64>(&cli.command)
            }
        }
        Command::Staircase { level, tol, grid, exact, out } => {
            by_mode!(*exact, cmd_staircase(*level, *tol, *grid, out))
        }
        Command::CantorIntervals { level, gaps, out } => cmd_cantor_intervals(*level, *gaps, out),
        Command::Polyop { n, poly, out } => cmd_polyop(*n, poly.as_deref(), out),
        Command::Graph { implies, dot, out } => cmd_graph(implies.as_deref(), *dot, out),
    }
}
