//! Bisection certificates for nonzero increments.
//!
//! Starting from `[a, b]` with `d = |f(b) - f(a)| > 0`, each step keeps a half
//! on which the increment is still at least `d / 2^(n+1)`. One half always
//! qualifies by the triangle inequality. The nested intervals satisfy
//! `b_n - a_n = (b - a)/2^n` and `|f(b_n) - f(a_n)| >= d/2^n`, so every chord
//! slope is at least `d/(b - a)` in magnitude and the common limit `c` has
//! `|f'(c)| >= d/(b - a)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::realfn::{Fn1D, Interval};
use crate::scalar::Scalar;

/// Number of trailing identical entries that flags a side as stationary.
pub const STATIONARY_RUN: usize = 8;

/// Relative tolerance of the derivative check at the limit point.
pub const DERIV_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HalvingRule {
    /// Keep the left half whenever it qualifies.
    LeftFirst,
    /// Keep the half with the larger increment.
    MaxIncrement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Positive,
    Negative,
}

/// How increments are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Measure {
    Absolute,
    Signed(Orientation),
}

impl Measure {
    fn apply<T: Scalar>(&self, delta: T) -> T {
        match self {
            Measure::Absolute => delta.abs(),
            Measure::Signed(Orientation::Positive) => delta,
            Measure::Signed(Orientation::Negative) => -delta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stationarity {
    LeftStationary,
    RightStationary,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivCheck {
    pub deriv_at_c: f64,
    /// `|d| / (b - a)`.
    pub floor: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// The adjacent sequences of a dichotomy run, one entry per level `0..=levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct BisectionTrace<T> {
    pub rule: HalvingRule,
    pub measure: Measure,
    pub a_seq: Vec<T>,
    pub b_seq: Vec<T>,
    pub fa_seq: Vec<T>,
    pub fb_seq: Vec<T>,
    /// `P(a_n, b_n)` per level.
    pub slopes: Vec<T>,
    /// `|f(b) - f(a)|`, or the signed `f(b) - f(a)` for oriented runs.
    pub d: T,
    /// Final midpoint, approximating the common limit.
    pub c: T,
    pub levels: usize,
    pub stationary: Stationarity,
    pub deriv_check: Option<DerivCheck>,
}

impl<T: Scalar> BisectionTrace<T> {
    pub fn interval(&self) -> (T, T) {
        (self.a_seq[0].clone(), self.b_seq[0].clone())
    }

    /// `d / (b - a)`, the bound every recorded slope respects.
    pub fn slope_floor(&self) -> T {
        let (a, b) = self.interval();
        self.d.clone() / (b - a)
    }
}

fn validate_levels(levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::InvalidParameter("dichotomy needs at least one level".into()));
    }
    if levels > 1000 {
        return Err(Error::InvalidParameter(format!("{levels} levels is beyond any useful precision")));
    }
    Ok(())
}

fn stationarity<T: PartialEq>(a_seq: &[T], b_seq: &[T]) -> Stationarity {
    let still = |s: &[T]| s.len() >= STATIONARY_RUN && s[s.len() - STATIONARY_RUN..].windows(2).all(|w| w[0] == w[1]);
    if still(a_seq) {
        Stationarity::LeftStationary
    } else if still(b_seq) {
        Stationarity::RightStationary
    } else {
        Stationarity::None
    }
}

pub(crate) fn run_dichotomy<T: Scalar>(
    f: &Fn1D,
    iv: &Interval<T>,
    levels: usize,
    rule: HalvingRule,
    measure: Measure,
) -> Result<BisectionTrace<T>> {
    validate_levels(levels)?;
    let (a, b) = (iv.lo().clone(), iv.hi().clone());
    let fa = f.eval(&a)?;
    let fb = f.eval(&b)?;
    let raw = fb.clone() - fa.clone();
    let target = measure.apply(raw.clone());
    match measure {
        Measure::Absolute if target.is_zero() => return Err(Error::EqualEndpointValues),
        Measure::Signed(_) if !(target > T::zero()) => return Err(Error::WrongOrientation),
        _ => {}
    }
    let d = match measure {
        Measure::Absolute => target.clone(),
        Measure::Signed(_) => raw,
    };

    let mut a_seq = vec![a.clone()];
    let mut b_seq = vec![b.clone()];
    let mut fa_seq = vec![fa.clone()];
    let mut fb_seq = vec![fb.clone()];
    let mut slopes = vec![(fb.clone() - fa.clone()) / (b.clone() - a.clone())];
    let (mut an, mut bn, mut fan, mut fbn) = (a.clone(), b.clone(), fa, fb);
    let mut threshold = target.clone() * T::lower_slack();

    for n in 0..levels {
        let cn = (an.clone() + bn.clone()).half();
        let fcn = f.eval(&cn)?;
        threshold = threshold.half();
        let left = measure.apply(fcn.clone() - fan.clone());
        let right = measure.apply(fbn.clone() - fcn.clone());
        let take_left = match rule {
            HalvingRule::LeftFirst => left >= threshold,
            HalvingRule::MaxIncrement => left >= right,
        };
        let kept = if take_left { &left } else { &right };
        if *kept < threshold {
            return Err(Error::NumericalBreakdown { level: n });
        }
        if take_left {
            bn = cn;
            fbn = fcn;
        } else {
            an = cn;
            fan = fcn;
        }
        slopes.push((fbn.clone() - fan.clone()) / (bn.clone() - an.clone()));
        a_seq.push(an.clone());
        b_seq.push(bn.clone());
        fa_seq.push(fan.clone());
        fb_seq.push(fbn.clone());
    }

    let c = (an + bn).half();
    let deriv_check = if f.has_deriv() {
        let deriv_at_c = f.deriv_at(&c)?.to_f64();
        let floor = (d.clone() / (b - a)).abs().to_f64();
        let tolerance = DERIV_CHECK_TOL * (1.0 + floor);
        let passed = match measure {
            Measure::Absolute => deriv_at_c.abs() >= floor - tolerance,
            Measure::Signed(Orientation::Positive) => deriv_at_c >= floor - tolerance,
            Measure::Signed(Orientation::Negative) => deriv_at_c <= -floor + tolerance,
        };
        Some(DerivCheck { deriv_at_c, floor, tolerance, passed })
    } else {
        None
    };

    Ok(BisectionTrace {
        rule,
        measure,
        stationary: stationarity(&a_seq, &b_seq),
        a_seq,
        b_seq,
        fa_seq,
        fb_seq,
        slopes,
        d,
        c,
        levels,
        deriv_check,
    })
}

/// Dichotomy witness for `f(a) != f(b)` with the left-first halving rule.
///
/// Continuity of `f` on the interval is the caller's responsibility.
pub fn fcd_witness<T: Scalar>(f: &Fn1D, iv: &Interval<T>, levels: usize) -> Result<BisectionTrace<T>> {
    fcd_witness_with_rule(f, iv, levels, HalvingRule::LeftFirst)
}

pub fn fcd_witness_with_rule<T: Scalar>(
    f: &Fn1D,
    iv: &Interval<T>,
    levels: usize,
    rule: HalvingRule,
) -> Result<BisectionTrace<T>> {
    run_dichotomy(f, iv, levels, rule, Measure::Absolute)
}

/// Oriented dichotomy: with `d = f(b) - f(a) > 0` (`Positive`) every slope is
/// at least `d/(b - a)`; `Negative` mirrors this for decreasing increments.
pub fn lagrange_witness<T: Scalar>(
    f: &Fn1D,
    iv: &Interval<T>,
    want: Orientation,
    levels: usize,
) -> Result<BisectionTrace<T>> {
    lagrange_witness_with_rule(f, iv, want, levels, HalvingRule::LeftFirst)
}

pub fn lagrange_witness_with_rule<T: Scalar>(
    f: &Fn1D,
    iv: &Interval<T>,
    want: Orientation,
    levels: usize,
    rule: HalvingRule,
) -> Result<BisectionTrace<T>> {
    run_dichotomy(f, iv, levels, rule, Measure::Signed(want))
}

/// Counter-certificate to `sup |f'| <= k`: when `|f(b) - f(a)| > k (b - a)`
/// the dichotomy trace has every `|slope| >= |f(b) - f(a)|/(b - a) > k`.
/// Returns `None` when the endpoint increment respects the bound.
pub fn iaf_refute<T: Scalar>(
    f: &Fn1D,
    iv: &Interval<T>,
    k: &T,
    levels: usize,
) -> Result<Option<BisectionTrace<T>>> {
    if *k < T::zero() {
        return Err(Error::NegativeK);
    }
    let increment = (f.eval(iv.hi())? - f.eval(iv.lo())?).abs();
    if increment > k.clone() * iv.width() {
        fcd_witness(f, iv, levels).map(Some)
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realfn::catalog;
    use crate::scalar::Rational;
    use std::f64::consts::FRAC_PI_2;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn identity_left_first_is_stationary_on_the_left() {
        let id = catalog("identity", &[]).unwrap();
        let iv = Interval::new(q(0, 1), q(1, 1)).unwrap();
        let t = fcd_witness(&id, &iv, 20).unwrap();
        for n in 0..=20 {
            assert_eq!(t.a_seq[n], q(0, 1));
            assert_eq!(t.b_seq[n], Rational::pow2_neg(n as u32));
            assert_eq!(t.slopes[n], q(1, 1));
        }
        assert_eq!(t.stationary, Stationarity::LeftStationary);
        assert!(t.deriv_check.unwrap().passed);
    }

    #[test]
    fn cube_witness_lands_past_inverse_sqrt_three() {
        let f = catalog("monomial", &[3]).unwrap();
        let exact = fcd_witness(&f, &Interval::new(q(0, 1), q(1, 1)).unwrap(), 40).unwrap();
        let float = fcd_witness(&f, &Interval::new(0.0, 1.0).unwrap(), 40).unwrap();
        assert!(exact.c.to_f64() >= 0.577 - 1e-6);
        assert!(float.c >= 0.577 - 1e-6);
        assert!((exact.c.to_f64() - float.c).abs() < 1e-9);
        assert!(exact.deriv_check.unwrap().passed);
    }

    #[test]
    fn sine_slopes_stay_above_two_over_pi() {
        let s = catalog("sin", &[]).unwrap();
        let t = fcd_witness(&s, &Interval::new(0.0, FRAC_PI_2).unwrap(), 40).unwrap();
        let floor = 1.0 / FRAC_PI_2;
        assert!(t.slopes.iter().all(|p| p.abs() >= floor * (1.0 - 1e-12)));
    }

    #[test]
    fn equal_endpoints_rejected() {
        let x2 = catalog("monomial", &[2]).unwrap();
        let r = fcd_witness(&x2, &Interval::new(-1.0, 1.0).unwrap(), 10);
        assert!(matches!(r, Err(Error::EqualEndpointValues)));
    }

    #[test]
    fn lagrange_examples() {
        let id = catalog("identity", &[]).unwrap();
        let t = lagrange_witness(&id, &Interval::new(0.0, 1.0).unwrap(), Orientation::Positive, 20).unwrap();
        assert!(t.slopes.iter().all(|&p| p >= 1.0));

        let f = catalog("poly", &[0, -1, 0, 1]).unwrap();
        let t = lagrange_witness(&f, &Interval::new(q(0, 1), q(2, 1)).unwrap(), Orientation::Positive, 40).unwrap();
        assert_eq!(t.d, q(6, 1));
        assert!(t.slopes.iter().all(|p| *p >= q(3, 1)));
        assert!(t.c.to_f64() >= (4.0f64 / 3.0).sqrt() - 1e-6);

        let neg = catalog("affine", &[-1, 0]).unwrap();
        let r = lagrange_witness(&neg, &Interval::new(0.0, 1.0).unwrap(), Orientation::Positive, 10);
        assert!(matches!(r, Err(Error::WrongOrientation)));
        let t = lagrange_witness(&neg, &Interval::new(0.0, 1.0).unwrap(), Orientation::Negative, 10).unwrap();
        assert!(t.slopes.iter().all(|&p| p <= -1.0));
        assert!(t.deriv_check.unwrap().passed);
    }

    #[test]
    fn refutation_examples() {
        let f = catalog("affine", &[2, 0]).unwrap();
        let t = iaf_refute(&f, &Interval::new(0.0, 1.0).unwrap(), &1.0, 20).unwrap().unwrap();
        assert!(t.slopes.iter().all(|&p| p.abs() == 2.0));

        let s = catalog("sin", &[]).unwrap();
        assert!(iaf_refute(&s, &Interval::new(0.0, FRAC_PI_2).unwrap(), &1.0, 20).unwrap().is_none());

        let c = catalog("monomial", &[3]).unwrap();
        let t = iaf_refute(&c, &Interval::new(0.0, 1.0).unwrap(), &0.5, 40).unwrap().unwrap();
        assert!(t.slopes.iter().all(|&p| p.abs() >= 1.0 * (1.0 - 1e-12)));
        assert!(t.c >= 1.0 / 3f64.sqrt() - 1e-6);

        assert!(matches!(iaf_refute(&c, &Interval::new(0.0, 1.0).unwrap(), &-1.0, 5), Err(Error::NegativeK)));
    }

    #[test]
    fn max_increment_rule_is_recorded() {
        let c = catalog("monomial", &[3]).unwrap();
        let t = fcd_witness_with_rule(&c, &Interval::new(q(0, 1), q(1, 1)).unwrap(), 30, HalvingRule::MaxIncrement).unwrap();
        assert_eq!(t.rule, HalvingRule::MaxIncrement);
        // the larger increment of x^3 always sits on the right
        assert_eq!(t.stationary, Stationarity::RightStationary);
        assert!(t.deriv_check.unwrap().passed);
    }
}
