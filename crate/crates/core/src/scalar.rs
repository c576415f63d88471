//! Numeric backends.
//!
//! Every certificate-producing algorithm is generic over [`Scalar`], which is
//! implemented for `f64` and for arbitrary-precision rationals. The rational
//! backend lets dichotomy and barycentric invariants be checked with zero
//! tolerance.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::realfn::RealMap;

pub type Rational = num::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NumericMode {
    Float64,
    ExactRational,
}

/// Slack applied to float comparisons that are exact statements in rational mode.
pub const FLOAT_SLACK: f64 = 1e-12;

pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: NumericMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    /// Exact conversion; `None` for NaN and infinities.
    fn from_f64(x: f64) -> Option<Self>;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    /// `2^-n`, exact in both backends for the level counts used here.
    fn pow2_neg(n: u32) -> Self;
    fn is_zero(&self) -> bool;

    fn map_eval(map: &dyn RealMap, x: &Self) -> Result<Self>;

    /// Multiplier applied to lower bounds that hold exactly in rational mode
    /// but only up to rounding in float mode.
    fn lower_slack() -> Self;

    /// `margin >= -slack * (1 + |scale|)` in float mode, `margin >= 0` exactly.
    fn nonnegative_within_slack(margin: &Self, scale: &Self) -> bool;

    fn to_json(&self) -> serde_json::Value;

    fn half(&self) -> Self {
        self.clone() / Self::from_i64(2)
    }
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Float64;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn pow2_neg(n: u32) -> Self {
        (-(n as i32) as f64).exp2()
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn map_eval(map: &dyn RealMap, x: &Self) -> Result<Self> {
        map.eval_f64(*x)
    }
    fn lower_slack() -> Self {
        1.0 - FLOAT_SLACK
    }
    fn nonnegative_within_slack(margin: &Self, scale: &Self) -> bool {
        *margin >= -FLOAT_SLACK * (1.0 + f64::abs(*scale))
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

impl Scalar for Rational {
    const MODE: NumericMode = NumericMode::ExactRational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Rational::from_float(x)
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn pow2_neg(n: u32) -> Self {
        Rational::new(BigInt::one(), BigInt::one() << n)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn map_eval(map: &dyn RealMap, x: &Self) -> Result<Self> {
        map.eval_exact(x)
    }
    fn lower_slack() -> Self {
        One::one()
    }
    fn nonnegative_within_slack(margin: &Self, _scale: &Self) -> bool {
        !margin.is_negative()
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(q) {
        if v.is_finite() {
            return v;
        }
    }
    // numerator and denominator can overflow f64 separately; scale both down
    let n_bits = q.numer().bits() as i64;
    let d_bits = q.denom().bits() as i64;
    let shift_n = (n_bits - 960).max(0) as usize;
    let shift_d = (d_bits - 960).max(0) as usize;
    let n = (q.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
    n / d * (shift_n as f64 - shift_d as f64).exp2()
}

/// Parses `p/q`, integers, decimals and scientific notation (`-1.5e-3`) exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::InvalidParameter(format!("zero denominator in `{text}`")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    if scale >= 0 {
        value *= Rational::from_integer(num::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Writes a rational as a finite decimal when its denominator has only the
/// prime factors 2 and 5.
pub fn terminating_decimal(q: &Rational) -> Option<String> {
    let mut den = q.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    if places == 0 {
        return Some(q.numer().to_string());
    }
    let scaled = q * Rational::from_integer(num::pow(BigInt::from(10u32), places));
    let n = scaled.to_integer();
    let digits = n.abs().to_string();
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    let sign = if n.is_negative() { "-" } else { "" };
    Some(format!("{sign}{int_part}.{frac_part}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-7").unwrap(), q(-7, 1));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("1e-6").unwrap(), q(1, 1_000_000));
        assert_eq!(parse_rational("-2.5E1").unwrap(), q(-25, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn decimal_printing() {
        assert_eq!(terminating_decimal(&q(1, 8)).unwrap(), "0.125");
        assert_eq!(terminating_decimal(&q(-5, 2)).unwrap(), "-2.5");
        assert_eq!(terminating_decimal(&q(1, 1_000_000)).unwrap(), "0.000001");
        assert_eq!(terminating_decimal(&q(12, 1)).unwrap(), "12");
        assert!(terminating_decimal(&q(1, 3)).is_none());
    }

    #[test]
    fn huge_rationals_convert() {
        let big = Rational::new(BigInt::one() << 2000u32, (BigInt::one() << 2000u32) * 3);
        assert!((rational_to_f64(&big) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pow2_matches() {
        assert_eq!(<f64 as Scalar>::pow2_neg(10), 1.0 / 1024.0);
        assert_eq!(<Rational as Scalar>::pow2_neg(3), q(1, 8));
    }
}
