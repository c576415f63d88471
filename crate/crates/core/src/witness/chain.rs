//! Epsilon-chains: finite knot sequences `a = t_0 < ... < t_m = b` whose every
//! chord slope is at most `M + ε`. Telescoping the per-step bounds gives
//! `f(b) - f(a) <= (M + ε)(b - a)`.
//!
//! The chain is grown greedily. From the current knot a step of `(b - a)/8`
//! is tried and halved until the chord slope is admissible; a step shrinking
//! below `min_step` means no admissible chord exists at that resolution,
//! which is numerical evidence against `f' <= M` near the stuck knot.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::realfn::{Fn1D, Interval};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainBound {
    /// `P(t_i, t_{i+1}) <= M + ε`.
    Upper,
    /// `|P(t_i, t_{i+1})| <= M + ε`.
    Absolute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonChain<T> {
    pub knots: Vec<T>,
    pub values: Vec<T>,
    pub m_bound: T,
    pub epsilon: T,
    pub step_slopes: Vec<T>,
    pub kind: ChainBound,
}

pub const INITIAL_STEP_FRACTION: i64 = 8;

impl<T: Scalar> EpsilonChain<T> {
    pub fn limit(&self) -> T {
        self.m_bound.clone() + self.epsilon.clone()
    }

    /// `f(b) - f(a)` read off the chain ends.
    pub fn rise(&self) -> T {
        self.values[self.values.len() - 1].clone() - self.values[0].clone()
    }

    /// Sum of the per-step rises.
    pub fn telescoped_rise(&self) -> T {
        self.values.windows(2).fold(T::zero(), |acc, w| acc + (w[1].clone() - w[0].clone()))
    }

    /// `(M + ε)(b - a)`.
    pub fn certified_bound(&self) -> T {
        let span = self.knots[self.knots.len() - 1].clone() - self.knots[0].clone();
        self.limit() * span
    }

    /// Re-derives the certificate from the knots: each step rise is bounded
    /// by `(M + ε)` times its width, and the sum of those bounds covers the
    /// increment over the whole interval.
    pub fn certifies(&self) -> bool {
        let limit = self.limit();
        let mut budget = T::zero();
        for (i, w) in self.knots.windows(2).enumerate() {
            let width = w[1].clone() - w[0].clone();
            let rise = self.values[i + 1].clone() - self.values[i].clone();
            let rise = match self.kind {
                ChainBound::Upper => rise,
                ChainBound::Absolute => rise.abs(),
            };
            let step_bound = limit.clone() * width;
            if !(w[0] < w[1]) || !T::nonnegative_within_slack(&(step_bound.clone() - rise), &step_bound) {
                return false;
            }
            budget = budget + step_bound;
        }
        let total = match self.kind {
            ChainBound::Upper => self.rise(),
            ChainBound::Absolute => self.rise().abs(),
        };
        let bound = self.certified_bound();
        T::nonnegative_within_slack(&(bound.clone() - total), &bound)
            && T::nonnegative_within_slack(&(bound.clone() - budget.clone()), &bound)
            && T::nonnegative_within_slack(&(budget - bound.clone()), &bound)
    }
}

pub fn epsilon_chain<T: Scalar>(
    f: &Fn1D,
    iv: &Interval<T>,
    m_bound: &T,
    epsilon: &T,
    min_step: &T,
) -> Result<EpsilonChain<T>> {
    build_chain(f, iv, m_bound, epsilon, min_step, ChainBound::Upper)
}

/// The `|·|` variant; with `M = 0` it is the chain behind "zero derivative
/// implies constant".
pub fn epsilon_chain_abs<T: Scalar>(
    f: &Fn1D,
    iv: &Interval<T>,
    m_bound: &T,
    epsilon: &T,
    min_step: &T,
) -> Result<EpsilonChain<T>> {
    build_chain(f, iv, m_bound, epsilon, min_step, ChainBound::Absolute)
}

fn build_chain<T: Scalar>(
    f: &Fn1D,
    iv: &Interval<T>,
    m_bound: &T,
    epsilon: &T,
    min_step: &T,
    kind: ChainBound,
) -> Result<EpsilonChain<T>> {
    if !(*epsilon > T::zero()) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if !(*min_step > T::zero()) {
        return Err(Error::InvalidParameter("min_step must be positive".into()));
    }
    let (a, b) = (iv.lo().clone(), iv.hi().clone());
    let limit = m_bound.clone() + epsilon.clone();
    let initial = iv.width() / T::from_i64(INITIAL_STEP_FRACTION);

    let mut t = a.clone();
    let mut ft = f.eval(&t)?;
    let mut knots = vec![t.clone()];
    let mut values = vec![ft.clone()];
    let mut step_slopes = Vec::new();

    while t < b {
        let remaining = b.clone() - t.clone();
        let mut step = if initial < remaining { initial.clone() } else { remaining };
        loop {
            let next = {
                let candidate = t.clone() + step.clone();
                if candidate >= b { b.clone() } else { candidate }
            };
            if !(next > t) {
                return Err(Error::StepFloorReached { t: t.to_f64() });
            }
            let fnext = f.eval(&next)?;
            let p = (fnext.clone() - ft.clone()) / (next.clone() - t.clone());
            let measured = match kind {
                ChainBound::Upper => p.clone(),
                ChainBound::Absolute => p.abs(),
            };
            if measured <= limit {
                step_slopes.push(p);
                t = next;
                ft = fnext;
                knots.push(t.clone());
                values.push(ft.clone());
                break;
            }
            step = step.half();
            if step < *min_step {
                return Err(Error::StepFloorReached { t: t.to_f64() });
            }
        }
    }

    Ok(EpsilonChain { knots, values, m_bound: m_bound.clone(), epsilon: epsilon.clone(), step_slopes, kind })
}
