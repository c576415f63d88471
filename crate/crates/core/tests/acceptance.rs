//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::f64::consts::FRAC_2_PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use fincr::cantor::{staircase_eval, staircase_limit};
use fincr::polyop::{d_matrix, has_primitive, kernel_basis, rank, Poly};
use fincr::slope::{barycentric_residual, counterexample_slopes, two_sided_slope_limit};
use fincr::theoremgraph::{build_graph, implications, Statement};
use fincr::witness::{
    darboux_witness_with, epsilon_chain, fcd_witness, mvt_witness_with, BisectionTrace, ExtremumParams,
};
use fincr::{catalog, Error, Interval, Rational, Scalar};
use num::traits::Zero;
use rand::Rng;

// Tolerances and sizes, all fixed.
const C1_CASES: usize = 200;
const C1_LEVELS: usize = 40;
const C1_BUDGET: Duration = Duration::from_millis(5);
const C3_TOL: f64 = 1e-6;
const C4_TOL: f64 = 1e-3;
const C5_POLYS: usize = 20;
const C5_TRIPLES: usize = 500;
const C6_GRID: usize = 10_000;
const C6_MAX_LEVEL: u32 = 20;
const C6_LIMIT_TOL: f64 = 1e-6;
const C6_POINTS: usize = 100;
const C7_MAX_N: usize = 10;
const C7_POLYS: usize = 100;
const C9_CASES: usize = 500;
const C9_TOL: f64 = 1e-6;
const C9_PASS_RATE: f64 = 0.99;
const C9_MAX_LEN: f64 = 4.0;
const C10_EPS: f64 = 0.01;
const SEED: u64 = 0xACCE97;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Every invariant of a dichotomy trace, checked with zero tolerance.
fn check_trace(f: &fincr::Fn1D, trace: &BisectionTrace<Rational>) -> Result<(), String> {
    let (a, b) = trace.interval();
    let width = b.clone() - a.clone();
    let d = trace.d.clone();
    for n in 0..=trace.levels {
        let (an, bn) = (&trace.a_seq[n], &trace.b_seq[n]);
        ensure(an < bn, format!("a_{n} >= b_{n}"))?;
        if n > 0 {
            ensure(trace.a_seq[n - 1] <= *an, format!("a decreases at {n}"))?;
            ensure(trace.b_seq[n - 1] >= *bn, format!("b increases at {n}"))?;
        }
        let pow = Rational::pow2_neg(n as u32);
        ensure(bn.clone() - an.clone() == width.clone() * pow.clone(), format!("width wrong at {n}"))?;
        let inc = abs(&(f.eval(bn).unwrap() - f.eval(an).unwrap()));
        ensure(inc >= d.clone() * pow, format!("increment below d/2^{n}"))?;
        ensure(abs(&trace.slopes[n]) >= d.clone() / width.clone(), format!("slope floor violated at {n}"))?;
        if n < trace.levels {
            let c = (an.clone() + bn.clone()) / q(2, 1);
            let fc = f.eval(&c).unwrap();
            let half = d.clone() * Rational::pow2_neg(n as u32 + 1);
            let left = abs(&(fc.clone() - f.eval(an).unwrap()));
            let right = abs(&(f.eval(bn).unwrap() - fc));
            ensure(left >= half || right >= half, format!("no half qualifies at {n}"))?;
        }
    }
    let last = &trace.b_seq[trace.levels];
    ensure(
        abs(&(last.clone() - trace.c.clone())) <= width * Rational::pow2_neg(trace.levels as u32),
        "c is not within the final interval",
    )
}

struct Corpus {
    cases: Vec<(Vec<Rational>, Rational, Rational)>,
}

fn corpus() -> Corpus {
    let mut r = rng(SEED);
    let mut cases = Vec::new();
    while cases.len() < C1_CASES {
        let degree = if cases.len() % 2 == 0 { 3 } else { 4 };
        let coeffs = poly_coeffs(&mut r, degree);
        let (a, b) = interval(&mut r);
        if horner(&coeffs, &a) != horner(&coeffs, &b) {
            cases.push((coeffs, a, b));
        }
    }
    Corpus { cases }
}

fn criterion_1(c: &Corpus) -> Outcome {
    let mut times = Vec::with_capacity(c.cases.len());
    for (coeffs, a, b) in &c.cases {
        let f = poly_fn(coeffs);
        let iv = Interval::new(a.clone(), b.clone()).unwrap();
        let start = Instant::now();
        let trace = fcd_witness(&f, &iv, C1_LEVELS).map_err(|e| e.to_string())?;
        times.push(start.elapsed());
        check_trace(&f, &trace)?;
    }
    times.sort();
    let (median, slowest) = (times[times.len() / 2], times[times.len() - 1]);
    ensure(slowest < C1_BUDGET, format!("slowest run took {slowest:?}"))?;
    Ok(format!("{C1_CASES} exact runs of {C1_LEVELS} levels, median {median:?}, slowest {slowest:?}"))
}

fn criterion_2() -> Outcome {
    let id = catalog("identity", &[]).unwrap();
    let iv = Interval::new(q(0, 1), q(1, 1)).unwrap();
    let trace = fcd_witness(&id, &iv, 20).unwrap();
    ensure(trace.a_seq.iter().all(Zero::is_zero), "a_n is not identically 0")?;
    for (n, b) in trace.b_seq.iter().enumerate() {
        ensure(*b == Rational::pow2_neg(n as u32), format!("b_{n} != 2^-{n}"))?;
    }
    let float = fcd_witness(&id, &Interval::new(0.0, 1.0).unwrap(), 20).unwrap();
    ensure(float.a_seq.iter().all(|&a| a == 0.0), "float a_n is not 0")?;
    ensure(float.b_seq.iter().enumerate().all(|(n, &b)| b == (-(n as f64)).exp2()), "float b_n != 2^-n")?;
    Ok("a_n = 0 and b_n = 2^-n exactly for n <= 20".into())
}

fn criterion_3(c: &Corpus) -> Outcome {
    let mut worst = f64::INFINITY;
    for (coeffs, a, b) in &c.cases {
        let f = poly_fn(coeffs);
        let trace = fcd_witness(&f, &Interval::new(a.clone(), b.clone()).unwrap(), C1_LEVELS).unwrap();
        let deriv = horner(&derivative_coeffs(coeffs), &trace.c);
        let floor = to_f64(&(trace.d.clone() / (b.clone() - a.clone())));
        let scale = 1.0 + floor;
        let slack = to_f64(&abs(&deriv)) - (floor - C3_TOL * scale);
        ensure(slack >= 0.0, format!("|f'(c)| below floor by {slack:e}"))?;
        worst = worst.min(slack);
    }
    Ok(format!("|f'(c)| >= d/(b-a) - {C3_TOL:e}*scale on all {C1_CASES}, tightest margin {worst:e}"))
}

fn criterion_4() -> Outcome {
    let c = counterexample_slopes(200);
    let gap = (c.slope - FRAC_2_PI).abs();
    ensure(gap <= C4_TOL, format!("|P_200 - 2/pi| = {gap:e}"))?;
    let f = catalog("fpq", &[2, 1]).unwrap();
    let r = two_sided_slope_limit(&f, 0.0, 0.5, 12).unwrap();
    ensure(r.estimate.abs() <= C4_TOL, format!("two-sided estimate {}", r.estimate))?;
    Ok(format!("|P_200 - 2/pi| = {gap:.2e}, two-sided estimate {:.2e}", r.estimate))
}

fn criterion_5() -> Outcome {
    let mut r = rng(SEED + 5);
    for _ in 0..C5_POLYS {
        let degree = r.gen_range(0..=6);
        let coeffs = poly_coeffs(&mut r, degree);
        let f = poly_fn(&coeffs);
        for _ in 0..C5_TRIPLES {
            let mut t = [rational(&mut r, 50, 13), rational(&mut r, 50, 13), rational(&mut r, 50, 13)];
            t.sort();
            if t[0] == t[1] || t[1] == t[2] {
                continue;
            }
            let res = barycentric_residual(&f, &t[0], &t[1], &t[2]).unwrap();
            ensure(Zero::is_zero(&res), format!("nonzero residual {res}"))?;
        }
    }
    Ok(format!("residual exactly 0 for {C5_POLYS} polynomials x {C5_TRIPLES} triples"))
}

fn criterion_6() -> Outcome {
    let grid: Vec<f64> = (0..C6_GRID).map(|i| i as f64 / (C6_GRID - 1) as f64).collect();
    for n in 0..=C6_MAX_LEVEL {
        let bound = (-(n as f64)).exp2();
        let mut prev = f64::NEG_INFINITY;
        for &x in &grid {
            let fn_ = staircase_eval(n, &x).unwrap();
            let next = staircase_eval(n + 1, &x).unwrap();
            ensure((next - fn_).abs() <= bound, format!("|f_{} - f_{n}| > 2^-{n} at {x}", n + 1))?;
            ensure(fn_ >= prev, format!("f_{n} decreases at {x}"))?;
            prev = fn_;
        }
    }
    let mut prev = f64::NEG_INFINITY;
    for &x in &grid {
        let v = staircase_limit(&x, C6_LIMIT_TOL).unwrap();
        ensure(v >= prev, format!("limit decreases at {x}"))?;
        prev = v;
    }
    let mut r = rng(SEED + 6);
    for _ in 0..C6_POINTS {
        let m = r.gen_range(1..=12u32);
        let k = r.gen_range(0..=3u64.pow(m));
        let x = q(k as i64, 3i64.pow(m));
        let got = staircase_limit(&x, C6_LIMIT_TOL).unwrap();
        let want = cantor_digit_map(k, m);
        let err = to_f64(&abs(&(got - want)));
        ensure(err <= C6_LIMIT_TOL, format!("limit off by {err:e} at {x}"))?;
    }
    Ok(format!("Cauchy bound for n <= {C6_MAX_LEVEL}, monotone on {C6_GRID} points, {C6_POINTS} digit-map checks"))
}

fn criterion_7() -> Outcome {
    for n in 1..=C7_MAX_N {
        let rk = rank(&d_matrix(n));
        let ker = kernel_basis(n).len();
        ensure(rk + ker == n + 1, format!("rank {rk} + kernel {ker} != {}", n + 1))?;
        ensure(!has_primitive(&Poly::monomial(n), n).unwrap().exists, format!("x^{n} has a primitive"))?;
    }
    let mut r = rng(SEED + 7);
    for _ in 0..C7_POLYS {
        let n = r.gen_range(1..=C7_MAX_N);
        let degree = r.gen_range(0..n);
        let p = Poly::new(poly_coeffs(&mut r, degree));
        let prim = has_primitive(&p, n).unwrap().primitive.ok_or("missing primitive")?;
        ensure(prim.derivative().same_as(&p), format!("D(primitive({p})) != p"))?;
    }
    Ok(format!("rank-nullity for n = 1..{C7_MAX_N}, {C7_POLYS} primitive round trips"))
}

fn closure() -> [[bool; 9]; 9] {
    let pos = |s: Statement| Statement::ALL.iter().position(|&t| t == s).unwrap();
    let mut reach = [[false; 9]; 9];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in implications() {
        reach[pos(e.from)][pos(e.to)] = true;
    }
    for k in 0..9 {
        for i in 0..9 {
            for j in 0..9 {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    reach
}

fn criterion_8() -> Outcome {
    let g = build_graph();
    ensure(g.implies(Statement::Iafg, Statement::Fcd), "IAFG does not reach FCD")?;
    ensure(!g.implies(Statement::Fcd, Statement::Iaf), "FCD reaches IAF")?;
    let reach = closure();
    let mut brute: Vec<Vec<Statement>> = (0..9)
        .map(|i| (0..9).filter(|&j| reach[i][j] && reach[j][i]).map(|j| Statement::ALL[j]).collect::<Vec<_>>())
        .collect();
    for c in &mut brute {
        c.sort();
    }
    brute.sort();
    brute.dedup();
    let classes = g.equivalence_classes();
    ensure(classes == brute, format!("SCC {classes:?} != closure {brute:?}"))?;
    for a in Statement::ALL {
        for b in Statement::ALL {
            ensure(g.implies(a, b) == reach[pos_of(a)][pos_of(b)], format!("implies({a}, {b}) disagrees"))?;
        }
    }
    Ok(format!("{} classes, matching the brute-force closure", classes.len()))
}

fn pos_of(s: Statement) -> usize {
    Statement::ALL.iter().position(|&t| t == s).unwrap()
}

#[derive(Default)]
struct Tally {
    passed: usize,
    flagged: usize,
}

fn criterion_9() -> Outcome {
    let params = ExtremumParams { grid: 1001, refine_levels: 60 };
    let mut r = rng(SEED + 9);
    let (mut mvt, mut dbx) = (Tally::default(), Tally::default());
    for _ in 0..C9_CASES {
        let degree = r.gen_range(1..=5);
        let coeffs: Vec<f64> = (0..=degree).map(|_| r.gen_range(-3.0..3.0f64)).collect();
        let exact: Vec<Rational> = coeffs.iter().map(|&c| Rational::from_float(c).unwrap()).collect();
        let f = poly_fn(&exact);
        let dcoeffs: Vec<f64> = derivative_coeffs(&exact).iter().map(to_f64).collect();
        let a = r.gen_range(-2.0..2.0f64);
        let b = a + r.gen_range(0.25..=C9_MAX_LEN);
        let iv = Interval::new(a, b).unwrap();
        let sample: Vec<f64> = (0..=1000).map(|i| horner_f64(&dcoeffs, a + (b - a) * i as f64 / 1000.0)).collect();
        let sup = sample.iter().fold(0f64, |m, d| m.max(d.abs()));

        let s = (horner_f64(&coeffs, b) - horner_f64(&coeffs, a)) / (b - a);
        match mvt_witness_with(&f, &iv, params) {
            Ok(w) => {
                let scale = 1.0 + sup.max(s.abs());
                let res = (horner_f64(&dcoeffs, w.c) - s).abs();
                ensure(w.c >= a && w.c <= b, format!("mvt c = {} outside [{a}, {b}]", w.c))?;
                ensure(res <= C9_TOL * scale, format!("silent bad mvt point: residual {res:e}"))?;
                mvt.passed += 1;
            }
            Err(Error::NoInteriorExtremum(_)) => mvt.flagged += 1,
            Err(e) => return Err(format!("unexpected mvt error {e}")),
        }

        let (lo, hi) = sample.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &d| (l.min(d), h.max(d)));
        if hi - lo < 1e-9 {
            dbx.passed += 1;
            continue;
        }
        let v = lo + (hi - lo) * r.gen_range(0.05..0.95);
        match darboux_witness_with(&f, &iv, v, 200, params) {
            Ok(w) => {
                let c = w.witness.c;
                let scale = 1.0 + sup.max(v.abs());
                let res = (horner_f64(&dcoeffs, c) - v).abs();
                ensure(c >= a && c <= b, format!("darboux c = {c} outside [{a}, {b}]"))?;
                ensure(res <= C9_TOL * scale, format!("silent bad darboux point: residual {res:e}"))?;
                dbx.passed += 1;
            }
            Err(Error::NoInteriorExtremum(_)) | Err(Error::TargetNotBracketed { .. }) => dbx.flagged += 1,
            Err(e) => return Err(format!("unexpected darboux error {e}")),
        }
    }
    let rate = |t: &Tally| t.passed as f64 / C9_CASES as f64;
    ensure(rate(&mvt) >= C9_PASS_RATE, format!("mvt pass rate {}", rate(&mvt)))?;
    ensure(rate(&dbx) >= C9_PASS_RATE, format!("darboux pass rate {}", rate(&dbx)))?;
    Ok(format!(
        "mvt {}/{C9_CASES} (flagged {}), darboux {}/{C9_CASES} (flagged {})",
        mvt.passed, mvt.flagged, dbx.passed, dbx.flagged
    ))
}

fn criterion_10() -> Outcome {
    let s = catalog("sin", &[]).unwrap();
    let chain = epsilon_chain(&s, &Interval::new(0.0, 1.0).unwrap(), &1.0, &C10_EPS, &1e-9).unwrap();
    ensure(chain.certifies(), "chain certificate does not verify")?;
    ensure(chain.step_slopes.iter().all(|&p| p <= 1.0 + C10_EPS), "a step slope exceeds M + eps")?;
    let bound = chain.certified_bound();
    ensure(1f64.sin() <= bound, format!("sin(1) > {bound}"))?;
    let id = catalog("identity", &[]).unwrap();
    let stuck = epsilon_chain(&id, &Interval::new(0.0, 1.0).unwrap(), &0.0, &0.5, &1e-9);
    ensure(matches!(stuck, Err(Error::StepFloorReached { .. })), format!("identity gave {stuck:?}"))?;
    Ok(format!("{} knots, sin(1) <= {bound}; identity stalls", chain.knots.len()))
}

const CLI_RUNS: &[&[&str]] = &[
    &["witness", "--fn", "x^3", "--interval", "0", "1", "--levels", "40"],
    &["witness", "--catalog", "poly", "--params", "1,-2,0,1", "--interval", "-1", "3/2", "--exact", "--levels", "30"],
    &["lagrange", "--fn", "x^3-x", "--interval", "0", "2", "--levels", "40"],
    &["refute-iaf", "--catalog", "monomial", "--params", "3", "--interval", "0", "1", "--k", "0.5"],
    &["chain", "--catalog", "sin", "--interval", "0", "1", "--M", "1", "--eps", "0.01"],
    &["rolle", "--fn", "x*(1-x)", "--interval", "0", "1"],
    &["mvt", "--fn", "x^3", "--interval", "0", "1"],
    &["darboux", "--fn", "x^3", "--interval", "-1", "1", "--v", "0.75"],
    &["slope", "--catalog", "fpq", "--params", "2,1", "--at", "0", "--levels", "12"],
    &["slope", "--fn", "x^2", "--x", "1", "--y", "3"],
    &["strict-probe", "--catalog", "fpq", "--params", "2,1", "--a", "0", "--jitter"],
    &["check-iaf", "--fn", "2*x", "--interval", "0", "1", "--k", "1"],
    &["check-iafp", "--fn", "x^2", "--interval", "0", "1", "--m", "0", "--M", "2"],
    &["check-iafg", "--catalog", "sin", "--g", "x", "--interval", "0", "pi/2"],
    &["check-maja", "--fn", "x^2", "--interval", "0", "1", "--M", "0.5"],
    &["staircase", "--tol", "1e-6", "--grid", "1000"],
    &["cantor-intervals", "--level", "3", "--gaps"],
    &["polyop", "--n", "4", "--poly", "1,0,2"],
    &["graph"],
];

fn criterion_11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_fincr");
    let mut compared = 0;
    for args in CLI_RUNS {
        for format in ["csv", "json"] {
            let run = || {
                Command::new(bin)
                    .args(*args)
                    .args(["--format", format, "--seed", "7"])
                    .output()
                    .map_err(|e| e.to_string())
            };
            let (first, second) = (run()?, run()?);
            ensure(first.status.code() == Some(0) || first.status.code() == Some(1), format!("{args:?} exited {:?}: {}", first.status.code(), String::from_utf8_lossy(&first.stderr)))?;
            ensure(!first.stdout.is_empty(), format!("{args:?} --format {format} printed nothing"))?;
            ensure(first.stdout == second.stdout && first.status == second.status, format!("{args:?} --format {format} differs between runs"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} command/format pairs byte-identical across two runs"))
}

fn main() {
    let corpus = corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("dichotomy invariants (exact)", Box::new(|| criterion_1(&corpus))),
        ("stationary case", Box::new(criterion_2)),
        ("slope floor transfers to f'(c)", Box::new(|| criterion_3(&corpus))),
        ("counterexample limit", Box::new(criterion_4)),
        ("barycentric identity", Box::new(criterion_5)),
        ("devil's staircase", Box::new(criterion_6)),
        ("derivative operator", Box::new(criterion_7)),
        ("theorem graph", Box::new(criterion_8)),
        ("mvt/darboux residuals", Box::new(criterion_9)),
        ("epsilon-chain", Box::new(criterion_10)),
        ("cli determinism", Box::new(criterion_11)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
