//! The devil's staircase.
//!
//! `K_n` is the union of the `2^n` closed intervals `[a/3^n, (a+1)/3^n]` whose
//! left numerator `a` has only the ternary digits 0 and 2. The level-`n`
//! approximant `f_n` is continuous, affine with slope `(3/2)^n` on each piece
//! of `K_n` and constant on every gap. `f_0` is the identity and
//! `|f_{n+1} - f_n| <= 2^-n`, so the `f_n` converge uniformly to the Cantor
//! function.
//!
//! Some statements of this construction count "2n" intervals; the rise
//! accounting (`2^n` pieces, each rising `2^-n`, total rise 1) only works with
//! `2^n`, which is what is built here.

use num::bigint::BigInt;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Deepest level supported; `3^30` still fits comfortably in a `u64`.
pub const MAX_LEVEL: u32 = 30;

fn check_level(n: u32) -> Result<()> {
    if n > MAX_LEVEL {
        Err(Error::LevelTooDeep(n))
    } else {
        Ok(())
    }
}

fn check_unit<T: Scalar>(x: &T) -> Result<()> {
    if *x < T::zero() || *x > T::one() {
        Err(Error::OutOfUnitInterval(x.to_f64()))
    } else {
        Ok(())
    }
}

/// `f_n(x)` for `x` in `[0, 1]`, in either numeric backend.
pub fn staircase_eval<T: Scalar>(n: u32, x: &T) -> Result<T> {
    check_level(n)?;
    check_unit(x)?;
    let one = T::one();
    let two = T::from_i64(2);
    let three = T::from_i64(3);
    let mut value = T::zero();
    let mut scale = T::one();
    let mut t = x.clone();
    for _ in 0..n {
        let t3 = three.clone() * t;
        if t3 <= one {
            t = t3;
        } else if t3 < two {
            return Ok(value + scale.half());
        } else {
            value = value + scale.half();
            t = t3 - two.clone();
        }
        scale = scale.half();
    }
    Ok(value + scale * t)
}

/// Derivative of `f_n`: `(3/2)^n` inside a piece of `K_n`, `0` inside a gap.
/// Breakpoints between a piece and a gap are reported as `DomainViolation`.
pub fn staircase_slope<T: Scalar>(n: u32, x: &T) -> Result<T> {
    check_level(n)?;
    check_unit(x).map_err(|_| Error::DomainViolation { name: String::new(), x: x.to_f64() })?;
    let one = T::one();
    let two = T::from_i64(2);
    let three = T::from_i64(3);
    let mut slope = T::one();
    let mut t = x.clone();
    for _ in 0..n {
        let t3 = three.clone() * t;
        if t3 == one || t3 == two {
            return Err(Error::DomainViolation { name: String::new(), x: x.to_f64() });
        }
        if t3 > one && t3 < two {
            return Ok(T::zero());
        }
        t = if t3 > two { t3 - two.clone() } else { t3 };
        slope = slope * three.clone() / two.clone();
    }
    Ok(slope)
}

/// Smallest level whose tail bound `2^(1-n)` is at most `tol`.
pub fn level_for_tolerance(tol: f64) -> Result<u32> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    (0..=MAX_LEVEL)
        .find(|&n| (1.0 - n as f64).exp2() <= tol)
        .ok_or(Error::TolTooSmall(tol))
}

/// The Cantor function at `x`, within `tol` of the limit.
pub fn staircase_limit<T: Scalar>(x: &T, tol: f64) -> Result<T> {
    check_unit(x)?;
    let n = level_for_tolerance(tol)?;
    staircase_eval(n, x)
}

/// One closed piece `[a/3^n, (a+1)/3^n]` of `K_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CantorPiece {
    pub level: u32,
    /// Left numerator; its ternary digits are all 0 or 2.
    pub numer: u64,
}

impl CantorPiece {
    pub fn lo(&self) -> Rational {
        Rational::new(BigInt::from(self.numer), BigInt::from(3u64.pow(self.level)))
    }

    pub fn hi(&self) -> Rational {
        Rational::new(BigInt::from(self.numer + 1), BigInt::from(3u64.pow(self.level)))
    }

    pub fn width(&self) -> Rational {
        Rational::new(BigInt::from(1u32), BigInt::from(3u64.pow(self.level)))
    }
}

/// A gap of `[0, 1] \ K_n` together with the constant value of `f_n` on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Plateau {
    pub lo: Rational,
    pub hi: Rational,
    pub value: Rational,
}

/// Level `n` of the construction. Pieces and gaps are enumerated lazily since
/// there are `2^n` of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StaircaseLevel {
    n: u32,
}

pub fn kn_intervals(n: u32) -> Result<StaircaseLevel> {
    check_level(n)?;
    Ok(StaircaseLevel { n })
}

impl StaircaseLevel {
    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn piece_count(&self) -> u64 {
        1 << self.n
    }

    /// The `i`-th piece from the left: binary digits of `i` become the
    /// ternary digits `0`/`2` of the left numerator.
    pub fn piece(&self, i: u64) -> CantorPiece {
        let mut numer = 0u64;
        let mut power = 1u64;
        let mut bits = i;
        for _ in 0..self.n {
            numer += 2 * (bits & 1) * power;
            bits >>= 1;
            power *= 3;
        }
        CantorPiece { level: self.n, numer }
    }

    pub fn pieces(&self) -> impl Iterator<Item = CantorPiece> + '_ {
        (0..self.piece_count()).map(move |i| self.piece(i))
    }

    /// Gaps between consecutive pieces; on the gap after piece `i` the
    /// approximant equals `(i+1)/2^n`.
    pub fn plateaus(&self) -> impl Iterator<Item = Plateau> + '_ {
        let denom = BigInt::from(1u64 << self.n);
        (0..self.piece_count().saturating_sub(1)).map(move |i| Plateau {
            lo: self.piece(i).hi(),
            hi: self.piece(i + 1).lo(),
            value: Rational::new(BigInt::from(i + 1), denom.clone()),
        })
    }

    pub fn slope(&self) -> Rational {
        Rational::new(BigInt::from(3u64.pow(self.n)), BigInt::from(1u64 << self.n))
    }

    pub fn eval<T: Scalar>(&self, x: &T) -> Result<T> {
        staircase_eval(self.n, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn level_zero_and_one() {
        let k0 = kn_intervals(0).unwrap();
        let p: Vec<_> = k0.pieces().collect();
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].lo(), p[0].hi()), (q(0, 1), q(1, 1)));
        let k1 = kn_intervals(1).unwrap();
        let p: Vec<_> = k1.pieces().map(|c| (c.lo(), c.hi())).collect();
        assert_eq!(p, vec![(q(0, 1), q(1, 3)), (q(2, 3), q(1, 1))]);
    }

    #[test]
    fn level_two_left_endpoints() {
        let lefts: Vec<_> = kn_intervals(2).unwrap().pieces().map(|c| c.lo()).collect();
        assert_eq!(lefts, vec![q(0, 1), q(2, 9), q(6, 9), q(8, 9)]);
    }

    #[test]
    fn endpoints_and_identity() {
        for n in [0, 1, 5, 30] {
            assert_eq!(staircase_eval(n, &0.0).unwrap(), 0.0);
            assert_eq!(staircase_eval(n, &1.0).unwrap(), 1.0);
        }
        for x in [0.1, 0.37, 0.9] {
            assert_eq!(staircase_eval(0, &x).unwrap(), x);
        }
        assert_eq!(staircase_eval(1, &q(1, 2)).unwrap(), q(1, 2));
    }

    #[test]
    fn limit_values() {
        assert_eq!(staircase_limit(&q(1, 2), 1e-6).unwrap(), q(1, 2));
        assert!((staircase_limit(&(1.0 / 9.0), 1e-6).unwrap() - 0.25).abs() <= 1e-6);
        assert!((staircase_limit(&(1.0 / 3.0), 1e-6).unwrap() - 0.5).abs() <= 1e-6);
    }

    #[test]
    fn errors() {
        assert!(matches!(kn_intervals(31), Err(Error::LevelTooDeep(31))));
        assert!(matches!(staircase_eval(3, &1.5), Err(Error::OutOfUnitInterval(_))));
        assert!(matches!(staircase_limit(&0.5, 1e-12), Err(Error::TolTooSmall(_))));
        assert!(matches!(staircase_limit(&-0.1, 1e-3), Err(Error::OutOfUnitInterval(_))));
    }

    #[test]
    fn tolerance_level() {
        assert_eq!(level_for_tolerance(1e-6).unwrap(), 21);
        assert_eq!(level_for_tolerance(2.0).unwrap(), 0);
        assert_eq!(level_for_tolerance(1.0).unwrap(), 1);
    }

    #[test]
    fn pieces_rise_exactly() {
        for n in 0..=6 {
            let level = kn_intervals(n).unwrap();
            let rise: Rational = level
                .pieces()
                .map(|p| {
                    let rise = staircase_eval(n, &p.hi()).unwrap() - staircase_eval(n, &p.lo()).unwrap();
                    assert_eq!(rise, Rational::pow2_neg(n));
                    assert_eq!(p.width() * level.slope(), rise);
                    rise
                })
                .sum();
            assert_eq!(rise, q(1, 1));
        }
    }

    #[test]
    fn plateaus_are_constant() {
        let level = kn_intervals(3).unwrap();
        assert_eq!(level.plateaus().count(), 7);
        for gap in level.plateaus() {
            let mid = (gap.lo.clone() + gap.hi.clone()) / q(2, 1);
            for x in [gap.lo.clone(), mid.clone(), gap.hi.clone()] {
                assert_eq!(staircase_eval(3, &x).unwrap(), gap.value);
            }
            assert_eq!(staircase_slope(3, &mid).unwrap(), q(0, 1));
            // every later level keeps the same value on this gap
            assert_eq!(staircase_eval(12, &mid).unwrap(), gap.value);
        }
    }

    #[test]
    fn slope_at_breakpoint_is_undefined() {
        assert!(staircase_slope(1, &q(1, 3)).is_err());
        assert_eq!(staircase_slope(1, &q(1, 6)).unwrap(), q(3, 2));
        assert_eq!(staircase_slope(2, &q(1, 18)).unwrap(), q(9, 4));
    }
}
