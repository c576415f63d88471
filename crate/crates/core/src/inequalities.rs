//! Endpoint validators for the finite-increment inequalities and the
//! reduction transforms linking them.
//!
//! A validator only judges the endpoint inequality. Hypotheses on `f'` can
//! be sampled with [`derivative_bound_estimate`], which is an estimate and
//! never a proven bound.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::export::trace_json;
use crate::realfn::{Fn1D, Interval};
use crate::scalar::Scalar;
use crate::witness::{iaf_refute, BisectionTrace};

/// Levels of the counter-witness attached to a failed IAF check.
pub const COUNTER_WITNESS_LEVELS: usize = 40;

/// One compared pair `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Side<T> {
    pub lhs: T,
    pub rhs: T,
    pub margin: T,
    pub holds: bool,
}

impl<T: Scalar> Side<T> {
    fn new(lhs: T, rhs: T) -> Self {
        let margin = rhs.clone() - lhs.clone();
        let holds = T::nonnegative_within_slack(&margin, &rhs);
        Self { lhs, rhs, margin, holds }
    }

    fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "margin": self.margin.to_json(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IneqReport<T> {
    pub holds: bool,
    pub lhs: T,
    pub rhs: T,
    /// `rhs - lhs` of the binding comparison.
    pub margin: T,
    /// Both sides of a two-sided check, lower side first.
    pub sides: Option<(Side<T>, Side<T>)>,
    pub counter_witness: Option<BisectionTrace<T>>,
}

impl<T: Scalar> IneqReport<T> {
    fn single(side: Side<T>) -> Self {
        Self { holds: side.holds, lhs: side.lhs, rhs: side.rhs, margin: side.margin, sides: None, counter_witness: None }
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "holds": self.holds,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "margin": self.margin.to_json(),
        });
        if let Some((lower, upper)) = &self.sides {
            out["lower"] = lower.to_json();
            out["upper"] = upper.to_json();
        }
        if let Some(trace) = &self.counter_witness {
            out["counter_witness"] = trace_json(trace);
        }
        out
    }
}

fn increment<T: Scalar>(f: &Fn1D, iv: &Interval<T>) -> Result<T> {
    Ok(f.eval(iv.hi())? - f.eval(iv.lo())?)
}

/// `|f(b) - f(a)| <= k (b - a)`; a failure carries a dichotomy trace whose
/// slopes all exceed `k` in magnitude.
pub fn check_iaf<T: Scalar>(f: &Fn1D, iv: &Interval<T>, k: &T) -> Result<IneqReport<T>> {
    if *k < T::zero() {
        return Err(Error::NegativeK);
    }
    let mut report = IneqReport::single(Side::new(increment(f, iv)?.abs(), k.clone() * iv.width()));
    if !report.holds {
        report.counter_witness = iaf_refute(f, iv, k, COUNTER_WITNESS_LEVELS)?;
    }
    Ok(report)
}

/// `m (b - a) <= f(b) - f(a) <= M (b - a)`.
pub fn check_iafprime<T: Scalar>(f: &Fn1D, iv: &Interval<T>, m: &T, big_m: &T) -> Result<IneqReport<T>> {
    if m > big_m {
        return Err(Error::BadBounds);
    }
    let delta = increment(f, iv)?;
    let lower = Side::new(m.clone() * iv.width(), delta.clone());
    let upper = Side::new(delta, big_m.clone() * iv.width());
    let binding = if lower.margin < upper.margin { &lower } else { &upper };
    Ok(IneqReport {
        holds: lower.holds && upper.holds,
        lhs: binding.lhs.clone(),
        rhs: binding.rhs.clone(),
        margin: binding.margin.clone(),
        sides: Some((lower, upper)),
        counter_witness: None,
    })
}

/// `|f(b) - f(a)| <= g(b) - g(a)`.
pub fn check_iafg<T: Scalar>(f: &Fn1D, g: &Fn1D, iv: &Interval<T>) -> Result<IneqReport<T>> {
    if !f.domain().covers(iv) || !g.domain().covers(iv) {
        return Err(Error::DomainMismatch);
    }
    Ok(IneqReport::single(Side::new(increment(f, iv)?.abs(), increment(g, iv)?)))
}

/// `f(b) - f(a) <= M (b - a)`.
pub fn check_maja<T: Scalar>(f: &Fn1D, iv: &Interval<T>, big_m: &T) -> Result<IneqReport<T>> {
    Ok(IneqReport::single(Side::new(increment(f, iv)?, big_m.clone() * iv.width())))
}

/// The pair `f1 = f - m x`, `f2 = M x - f` that turns bounds `m <= f' <= M`
/// into the nonnegative bounds `0 <= f1', f2' <= M - m`.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub f1: Fn1D,
    pub f2: Fn1D,
    pub m: f64,
    pub big_m: f64,
}

pub fn reduce_iaf_to_iafprime(f: &Fn1D, m: f64, big_m: f64) -> Result<Reduction> {
    if !(m <= big_m) {
        return Err(Error::BadBounds);
    }
    let f1 = f.linear_combo(format!("{} - ({m})x", f.name()), 1.0, -m, 0.0);
    let f2 = f.linear_combo(format!("({big_m})x - {}", f.name()), -1.0, big_m, 0.0);
    Ok(Reduction { f1, f2, m, big_m })
}

impl Reduction {
    /// Samples `f1'` and `f2'` on an interior grid and reports whether both
    /// stay in `[0, M - m]`. `None` when `f` has no derivative oracle.
    pub fn premise_holds(&self, iv: &Interval, grid: usize) -> Result<Option<bool>> {
        if !self.f1.has_deriv() {
            return Ok(None);
        }
        let width = self.big_m - self.m;
        let slack = 1e-12 * (1.0 + width.abs().max(self.m.abs()).max(self.big_m.abs()));
        let ok = |d: f64| d >= -slack && d <= width + slack;
        for x in interior_grid(iv, grid)? {
            if !ok(self.f1.deriv_at(&x)?) || !ok(self.f2.deriv_at(&x)?) {
                return Ok(Some(false));
            }
        }
        Ok(Some(true))
    }
}

fn interior_grid(iv: &Interval, grid: usize) -> Result<impl Iterator<Item = f64>> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("grid must be >= 2, got {grid}")));
    }
    let (lo, hi) = (*iv.lo(), *iv.hi());
    let h = (hi - lo) / (grid + 1) as f64;
    Ok((1..=grid).map(move |i| lo + i as f64 * h))
}

/// `(min f', max f')` over `x_i = lo + i (hi - lo)/(grid + 1)`, `i = 1..=grid`.
pub fn derivative_bound_estimate(f: &Fn1D, iv: &Interval, grid: usize) -> Result<(f64, f64)> {
    if !f.has_deriv() {
        return Err(Error::MissingDerivOracle(f.name().to_string()));
    }
    let mut bounds = (f64::INFINITY, f64::NEG_INFINITY);
    for x in interior_grid(iv, grid)? {
        let d = f.deriv_at(&x)?;
        bounds = (bounds.0.min(d), bounds.1.max(d));
    }
    Ok(bounds)
}
