//! The slope function `P(x, y) = (f(y) - f(x)) / (y - x)` and numerical
//! probes of its limits.
//!
//! Two probes are offered. [`two_sided_slope_limit`] only samples pairs that
//! straddle the base point (`x < a < y`), which converge to `f'(a)` for any
//! differentiable `f`. [`strict_deriv_probe`] samples unrestricted pairs,
//! including pairs on the same side of `a`, whose limit exists only when `f`
//! is strictly differentiable at `a`. Both return heuristic classifications:
//! a finite sample never proves a limit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::realfn::{catalog, Fn1D};
use crate::scalar::Scalar;

/// `P(x, y)`; symmetric in its arguments.
pub fn slope<T: Scalar>(f: &Fn1D, x: &T, y: &T) -> Result<T> {
    if x == y {
        return Err(Error::EqualPoints);
    }
    let fx = f.eval(x)?;
    let fy = f.eval(y)?;
    Ok((fy - fx) / (y.clone() - x.clone()))
}

/// `P(x, y) - [(a-x)/(y-x) P(a, x) + (y-a)/(y-x) P(a, y)]` for `x < a < y`.
/// Identically zero in exact arithmetic.
pub fn barycentric_residual<T: Scalar>(f: &Fn1D, x: &T, a: &T, y: &T) -> Result<T> {
    if !(x < a && a < y) {
        return Err(Error::OrderingViolated);
    }
    let width = y.clone() - x.clone();
    let left_weight = (a.clone() - x.clone()) / width.clone();
    let right_weight = (y.clone() - a.clone()) / width;
    let combined = left_weight * slope(f, a, x)? + right_weight * slope(f, a, y)?;
    Ok(slope(f, x, y)? - combined)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ConsistentWithStrict,
    NotStrict,
    Inconclusive,
}

/// Outcome of a slope probe. The verdict is a heuristic classification of
/// finite samples, not a proof.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeProbeReport {
    pub estimate: f64,
    /// `max - min` of the sampled slopes at the finest level.
    pub dispersion: f64,
    /// Pair at the finest level maximizing `|P(x, y) - f'(a)|` (or the
    /// distance to `estimate` when no derivative oracle is present).
    pub adversarial_pair: Option<(f64, f64)>,
    pub adversarial_slope: Option<f64>,
    pub level_dispersions: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeThresholds {
    /// Dispersion (and adversarial distance) above which a probe says `NotStrict`.
    pub coarse: f64,
    /// Dispersion below which a probe says `ConsistentWithStrict`.
    pub fine: f64,
}

impl Default for ProbeThresholds {
    fn default() -> Self {
        Self { coarse: 1e-2, fine: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProbeConfig {
    pub thresholds: ProbeThresholds,
    /// When set, base points are drawn uniformly from each window with this
    /// seed instead of lying on a uniform grid.
    pub jitter_seed: Option<u64>,
}

/// Ratio between consecutive probe windows.
const SHRINK: f64 = 0.125;
/// Offsets `w * 2^-j` used on each side by the straddling probe.
const STRADDLE_DEPTH: i32 = 8;
/// Close-pair offsets `w * 2^-m` used by the strict probe.
const MICRO_DEPTH: i32 = 48;
/// A pair is kept only when its gap dwarfs the rounding error of `f(y) - f(x)`.
const ROUNDING_GUARD: f64 = f64::EPSILON * 1e8;

fn window(h0: f64, level: usize) -> f64 {
    h0 * SHRINK.powi(level as i32)
}

struct Sample {
    x: f64,
    y: f64,
    p: f64,
}

fn spread(samples: &[Sample]) -> f64 {
    if samples.is_empty() {
        return f64::INFINITY;
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.p), hi.max(s.p)));
    hi - lo
}

fn median(samples: &[Sample]) -> f64 {
    let mut ps: Vec<f64> = samples.iter().map(|s| s.p).collect();
    ps.sort_by(f64::total_cmp);
    match ps.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => ps[n / 2],
        n => 0.5 * (ps[n / 2 - 1] + ps[n / 2]),
    }
}

fn check_window(f: &Fn1D, a: f64, h0: f64, levels: usize) -> Result<()> {
    if !(h0 > 0.0) || !h0.is_finite() {
        return Err(Error::InvalidParameter(format!("h0 must be positive, got {h0}")));
    }
    if levels < 2 {
        return Err(Error::InvalidParameter("probes need at least 2 levels".into()));
    }
    for x in [a - h0, a + h0] {
        if !f.domain().contains_scalar(&x) {
            return Err(Error::DomainViolation { name: f.name().to_string(), x });
        }
    }
    Ok(())
}

fn classify(
    dispersions: &[f64],
    adversarial_distance: Option<f64>,
    thresholds: &ProbeThresholds,
) -> Verdict {
    let last = *dispersions.last().unwrap_or(&f64::INFINITY);
    let far = adversarial_distance.is_some_and(|d| d > thresholds.coarse);
    let monotone = dispersions.windows(2).all(|w| w[1] <= w[0]);
    if last > thresholds.coarse && far {
        Verdict::NotStrict
    } else if last < thresholds.fine && monotone {
        Verdict::ConsistentWithStrict
    } else {
        Verdict::Inconclusive
    }
}

fn build_report(
    f: &Fn1D,
    a: f64,
    estimate: f64,
    finest: &[Sample],
    dispersions: Vec<f64>,
    thresholds: &ProbeThresholds,
) -> Result<SlopeProbeReport> {
    let reference = if f.has_deriv() { f.deriv_f64(a)? } else { estimate };
    let adversarial = finest
        .iter()
        .max_by(|l, r| (l.p - reference).abs().total_cmp(&(r.p - reference).abs()));
    let distance = adversarial.map(|s| (s.p - reference).abs());
    Ok(SlopeProbeReport {
        estimate,
        dispersion: *dispersions.last().unwrap_or(&f64::INFINITY),
        adversarial_pair: adversarial.map(|s| (s.x, s.y)),
        adversarial_slope: adversarial.map(|s| s.p),
        verdict: classify(&dispersions, distance, thresholds),
        level_dispersions: dispersions,
    })
}

/// Samples `P(a - h, a + k)` over independently shrinking `h, k` in
/// `(0, h0]`, including the asymmetric schedules `k = h^2/h0` and
/// `h = k^2/h0`. The estimate is the symmetric slope at the finest level.
pub fn two_sided_slope_limit(f: &Fn1D, a: f64, h0: f64, levels: usize) -> Result<SlopeProbeReport> {
    two_sided_slope_limit_with(f, a, h0, levels, &ProbeThresholds::default())
}

pub fn two_sided_slope_limit_with(
    f: &Fn1D,
    a: f64,
    h0: f64,
    levels: usize,
    thresholds: &ProbeThresholds,
) -> Result<SlopeProbeReport> {
    check_window(f, a, h0, levels)?;
    let mut dispersions = Vec::with_capacity(levels);
    let mut finest = Vec::new();
    let mut estimate = f64::NAN;
    for level in 0..levels {
        let w = window(h0, level);
        let mut offsets: Vec<f64> = (0..STRADDLE_DEPTH).map(|j| w * (-j as f64).exp2()).collect();
        offsets.push(w * w / h0);
        let mut samples = Vec::with_capacity(offsets.len() * offsets.len());
        for &h in &offsets {
            for &k in &offsets {
                let (x, y) = (a - h, a + k);
                if !(x < a && a < y) {
                    continue;
                }
                samples.push(Sample { x, y, p: slope(f, &x, &y)? });
            }
        }
        dispersions.push(spread(&samples));
        if level + 1 == levels {
            estimate = slope(f, &(a - w), &(a + w))?;
            finest = samples;
        }
    }
    build_report(f, a, estimate, &finest, dispersions, thresholds)
}

fn admissible(x: f64, y: f64, fx: f64, fy: f64) -> bool {
    let gap = (y - x).abs();
    gap > 0.0
        && gap >= ROUNDING_GUARD * fx.abs().max(fy.abs())
        && gap >= (-46f64).exp2() * x.abs().max(y.abs())
}

/// Samples `P(x, y)` over unrestricted pairs `x != y` in shrinking windows
/// around `a`: all pairs of `samples_per_level` base points (same-side and
/// straddling), plus close pairs `(x, x ± w 2^-m)` at every base point.
pub fn strict_deriv_probe(
    f: &Fn1D,
    a: f64,
    h0: f64,
    levels: usize,
    samples_per_level: usize,
) -> Result<SlopeProbeReport> {
    strict_deriv_probe_with(f, a, h0, levels, samples_per_level, &ProbeConfig::default())
}

pub fn strict_deriv_probe_with(
    f: &Fn1D,
    a: f64,
    h0: f64,
    levels: usize,
    samples_per_level: usize,
    config: &ProbeConfig,
) -> Result<SlopeProbeReport> {
    if !f.has_deriv() {
        return Err(Error::MissingDerivOracle(f.name().to_string()));
    }
    check_window(f, a, h0, levels)?;
    if samples_per_level < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples per level".into()));
    }
    let mut rng = config.jitter_seed.map(ChaCha8Rng::seed_from_u64);
    let mut dispersions = Vec::with_capacity(levels);
    let mut finest = Vec::new();
    for level in 0..levels {
        let w = window(h0, level);
        let mut points: Vec<f64> = match rng.as_mut() {
            Some(rng) => (0..samples_per_level).map(|_| a + w * rng.gen_range(-1.0..=1.0)).collect(),
            None => (0..samples_per_level)
                .map(|i| a + w * (2.0 * i as f64 / (samples_per_level - 1) as f64 - 1.0))
                .collect(),
        };
        points.push(a);
        let values = points.iter().map(|x| f.eval_f64(*x)).collect::<Result<Vec<_>>>()?;

        let mut samples = Vec::new();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let (x, y, fx, fy) = (points[i], points[j], values[i], values[j]);
                if admissible(x, y, fx, fy) {
                    samples.push(Sample { x, y, p: (fy - fx) / (y - x) });
                }
            }
        }
        for (&x, &fx) in points.iter().zip(&values) {
            let toward = if x > a { -1.0 } else { 1.0 };
            for m in 1..=MICRO_DEPTH {
                let y = x + toward * w * (-m as f64).exp2();
                if y == x {
                    break;
                }
                let fy = f.eval_f64(y)?;
                if admissible(x, y, fx, fy) {
                    samples.push(Sample { x, y, p: (fy - fx) / (y - x) });
                }
            }
        }
        dispersions.push(spread(&samples));
        if level + 1 == levels {
            finest = samples;
        }
    }
    let estimate = median(&finest);
    build_report(f, a, estimate, &finest, dispersions, &config.thresholds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleSlope {
    pub n: u64,
    pub x: f64,
    pub y: f64,
    pub slope: f64,
}

/// Slopes of `x^2 sin(1/x)` along `x_n = 1/(π/2 + (2n+1)π)`, `y_n = 1/(π/2 + 2nπ)`.
/// Both sequences tend to `0` while the slopes tend to `2/π`, although the
/// derivative at `0` is `0`.
pub fn counterexample_slopes(n: u64) -> CounterexampleSlope {
    use std::f64::consts::{FRAC_PI_2, PI};
    let f = catalog("fpq", &[2, 1]).expect("fpq(2,1) is in the catalog");
    let n_f = n as f64;
    let x = 1.0 / (FRAC_PI_2 + (2.0 * n_f + 1.0) * PI);
    let y = 1.0 / (FRAC_PI_2 + 2.0 * n_f * PI);
    let slope = slope(&f, &x, &y).expect("x_n < y_n lie in the domain");
    CounterexampleSlope { n, x, y, slope }
}
