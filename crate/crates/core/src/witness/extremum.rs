//! Rolle, mean-value and Darboux witnesses.
//!
//! Rolle's point is located the way the classical proof finds it: a
//! continuous function on a segment attains its bounds, so a dense sample
//! picks the interior extremum and a ternary search refines it. No root of
//! `f'` is ever searched for; the derivative oracle only audits the result.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::realfn::{Fn1D, Interval};

/// Tolerance on `|f(a) - f(b)|` for Rolle's hypothesis, relative to `1 + |f(a)|`.
pub const ENDPOINT_TOL: f64 = 1e-12;
/// Relative tolerance of every derivative residual check.
pub const RESIDUAL_TOL: f64 = 1e-6;
/// Relative accuracy of the Darboux mean-slope bisection.
pub const BISECT_TOL: f64 = 1e-9;
/// The Darboux endpoint samples sit `width * 2^-30` inside the interval.
pub const INSET_EXP: i32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtremumParams {
    pub grid: usize,
    pub refine_levels: usize,
}

impl Default for ExtremumParams {
    fn default() -> Self {
        Self { grid: 1001, refine_levels: 60 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub c: f64,
    /// Slope `f'(c)` should match: 0 for Rolle, the mean slope for MVT, `v`
    /// for Darboux.
    pub target_slope: f64,
    pub deriv_at_c: Option<f64>,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub scale: f64,
    pub constant_on_grid: bool,
}

struct Located {
    c: f64,
    constant_on_grid: bool,
    /// `max |f'|` over the interior grid points, when an oracle exists.
    sup_deriv: Option<f64>,
}

fn grid_points(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + i as f64 * step })
}

fn ternary_max<F: Fn(f64) -> Result<f64>>(h: F, mut l: f64, mut r: f64, levels: usize) -> Result<f64> {
    for _ in 0..levels {
        let m1 = l + (r - l) / 3.0;
        let m2 = r - (r - l) / 3.0;
        if h(m1)? < h(m2)? {
            l = m1;
        } else {
            r = m2;
        }
    }
    Ok(0.5 * (l + r))
}

fn locate_extremum(f: &Fn1D, iv: &Interval, params: ExtremumParams) -> Result<Located> {
    if params.grid < 3 {
        return Err(Error::InvalidParameter(format!("grid must be >= 3, got {}", params.grid)));
    }
    let (lo, hi) = (*iv.lo(), *iv.hi());
    let xs: Vec<f64> = grid_points(lo, hi, params.grid).collect();
    let vs = xs.iter().map(|&x| f.eval(&x)).collect::<Result<Vec<_>>>()?;

    let sup_deriv = if f.has_deriv() {
        let mut sup = 0f64;
        for &x in &xs[1..xs.len() - 1] {
            sup = sup.max(f.deriv_at(&x)?.abs());
        }
        Some(sup)
    } else {
        None
    };

    let (vmin, vmax) = vs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let magnitude = vs.iter().fold(0f64, |m, v| m.max(v.abs()));
    if vmax - vmin <= 16.0 * f64::EPSILON * (1.0 + magnitude) {
        return Ok(Located { c: iv.midpoint(), constant_on_grid: true, sup_deriv });
    }

    let base = vs[0];
    let (i, dev) = (1..xs.len() - 1)
        .map(|i| (i, vs[i] - base))
        .fold((0, 0f64), |best, cur| if cur.1.abs() > best.1.abs() { cur } else { best });
    if i == 0 {
        return Err(Error::NoInteriorExtremum("every sampled extremum sits at an endpoint".into()));
    }
    let sign = dev.signum();
    let c = ternary_max(|x| f.eval(&x).map(|v| sign * v), xs[i - 1], xs[i + 1], params.refine_levels)?;
    Ok(Located { c, constant_on_grid: false, sup_deriv })
}

fn audit(
    f: &Fn1D,
    located: &Located,
    target: f64,
    scale: f64,
) -> Result<Witness> {
    let tolerance = RESIDUAL_TOL * scale;
    let (deriv_at_c, residual) = if f.has_deriv() {
        let d = f.deriv_at(&located.c)?;
        (Some(d), Some((d - target).abs()))
    } else {
        (None, None)
    };
    if let Some(r) = residual {
        if !(r <= tolerance) {
            return Err(Error::NoInteriorExtremum(format!(
                "|f'(c) - {target}| = {r:e} exceeds {tolerance:e} at c = {}",
                located.c
            )));
        }
    }
    Ok(Witness {
        c: located.c,
        target_slope: target,
        deriv_at_c,
        residual,
        tolerance: residual.map(|_| tolerance),
        scale,
        constant_on_grid: located.constant_on_grid,
    })
}

/// A point `c` in `]a, b[` with `f'(c) = 0`, given `f(a) = f(b)`.
pub fn rolle_witness(f: &Fn1D, iv: &Interval, grid: usize, refine_levels: usize) -> Result<Witness> {
    rolle_witness_with(f, iv, ExtremumParams { grid, refine_levels })
}

pub fn rolle_witness_with(f: &Fn1D, iv: &Interval, params: ExtremumParams) -> Result<Witness> {
    let fa = f.eval(iv.lo())?;
    let fb = f.eval(iv.hi())?;
    if (fa - fb).abs() > ENDPOINT_TOL * (1.0 + fa.abs()) {
        return Err(Error::EndpointsNotEqual);
    }
    let located = locate_extremum(f, iv, params)?;
    let scale = 1.0 + located.sup_deriv.unwrap_or(0.0);
    audit(f, &located, 0.0, scale)
}

/// A point `c` with `f'(c) = (f(b) - f(a))/(b - a)`, via Rolle applied to
/// `g(x) = f(x) - s (x - a)`.
pub fn mvt_witness(f: &Fn1D, iv: &Interval, grid: usize, refine_levels: usize) -> Result<Witness> {
    mvt_witness_with(f, iv, ExtremumParams { grid, refine_levels })
}

pub fn mvt_witness_with(f: &Fn1D, iv: &Interval, params: ExtremumParams) -> Result<Witness> {
    let (a, b) = (*iv.lo(), *iv.hi());
    let s = (f.eval(&b)? - f.eval(&a)?) / (b - a);
    let g = f.linear_combo(format!("{} - chord", f.name()), 1.0, -s, s * a);
    let located = locate_extremum(&g, iv, params)?;
    let sup_f = located.sup_deriv.map(|sup_g| sup_g + s.abs()).unwrap_or(0.0);
    let scale = 1.0 + sup_f.max(s.abs());
    audit(f, &located, s, scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DarbouxBranch {
    /// `φ(x) = P(α, x)`, `φ(α) = f'(α)`.
    Phi,
    /// `ψ(x) = P(x, β)`, `ψ(β) = f'(β)`.
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DarbouxWitness {
    pub witness: Witness,
    /// Sub-interval `[α, β]` whose endpoint derivatives bracket `v`.
    pub bracket: (f64, f64),
    pub branch: DarbouxBranch,
    /// Point where the bracketing mean slope equals `v`.
    pub x: f64,
}

/// A point `c` with `f'(c) = v` for `v` strictly between two derivative values.
pub fn darboux_witness(f: &Fn1D, iv: &Interval, v: f64, bisect_levels: usize) -> Result<DarbouxWitness> {
    darboux_witness_with(f, iv, v, bisect_levels, ExtremumParams::default())
}

fn strictly_between(v: f64, p: f64, q: f64) -> bool {
    (p < v && v < q) || (q < v && v < p)
}

pub fn darboux_witness_with(
    f: &Fn1D,
    iv: &Interval,
    v: f64,
    bisect_levels: usize,
    params: ExtremumParams,
) -> Result<DarbouxWitness> {
    if !f.has_deriv() {
        return Err(Error::MissingDerivOracle(f.name().to_string()));
    }
    if params.grid < 3 {
        return Err(Error::InvalidParameter(format!("grid must be >= 3, got {}", params.grid)));
    }
    let (a, b) = (*iv.lo(), *iv.hi());
    let inset = (b - a) * (-INSET_EXP as f64).exp2();
    let (a_in, b_in) = (a + inset, b - inset);
    let (da, db) = (f.deriv_at(&a_in)?, f.deriv_at(&b_in)?);

    let (alpha, beta, d_alpha, d_beta) = if strictly_between(v, da, db) {
        (a_in, b_in, da, db)
    } else {
        // Pair the sampled derivative extremes lying on opposite sides of v,
        // so the bracket is as wide as the samples allow.
        let xs: Vec<f64> = grid_points(a_in, b_in, params.grid).collect();
        let ds = xs.iter().map(|x| f.deriv_at(x)).collect::<Result<Vec<_>>>()?;
        let lowest = (0..xs.len()).min_by(|&i, &j| ds[i].total_cmp(&ds[j])).expect("grid is nonempty");
        let highest = (0..xs.len()).max_by(|&i, &j| ds[i].total_cmp(&ds[j])).expect("grid is nonempty");
        if !(ds[lowest] < v && v < ds[highest]) {
            return Err(Error::TargetNotBracketed { v });
        }
        let (i, j) = (lowest.min(highest), lowest.max(highest));
        (xs[i], xs[j], ds[i], ds[j])
    };
    let scale = 1.0 + d_alpha.abs().max(d_beta.abs()).max(v.abs());

    let fa = f.eval(&alpha)?;
    let fb = f.eval(&beta)?;
    let s = (fb - fa) / (beta - alpha);
    let phi_side = d_alpha == v || strictly_between(v, d_alpha, s) || s == v;
    let branch = if phi_side { DarbouxBranch::Phi } else { DarbouxBranch::Psi };

    let x = if s == v {
        if phi_side { beta } else { alpha }
    } else {
        // continuous function on [alpha, beta] with endpoint values bracketing v
        let h = |x: f64| -> Result<f64> {
            match branch {
                DarbouxBranch::Phi if x == alpha => Ok(d_alpha),
                DarbouxBranch::Phi => Ok((f.eval(&x)? - fa) / (x - alpha)),
                DarbouxBranch::Psi if x == beta => Ok(d_beta),
                DarbouxBranch::Psi => Ok((fb - f.eval(&x)?) / (beta - x)),
            }
        };
        let (mut lo, mut hi) = (alpha, beta);
        let lo_above = h(lo)? > v;
        let target = BISECT_TOL * scale;
        let mut found = None;
        for _ in 0..bisect_levels {
            let mid = 0.5 * (lo + hi);
            let hm = h(mid)?;
            if (hm - v).abs() <= target && mid > alpha && mid < beta {
                found = Some(mid);
                break;
            }
            if (hm > v) == lo_above {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        found.ok_or(Error::TargetNotBracketed { v })?
    };

    let sub = match branch {
        DarbouxBranch::Phi => Interval::new(alpha, x)?,
        DarbouxBranch::Psi => Interval::new(x, beta)?,
    };
    let mvt = mvt_witness_with(f, &sub, params)?;
    let deriv_at_c = f.deriv_at(&mvt.c)?;
    let residual = (deriv_at_c - v).abs();
    let tolerance = RESIDUAL_TOL * scale;
    if !(residual <= tolerance) {
        return Err(Error::NoInteriorExtremum(format!(
            "|f'(c) - {v}| = {residual:e} exceeds {tolerance:e} at c = {}",
            mvt.c
        )));
    }
    Ok(DarbouxWitness {
        witness: Witness {
            c: mvt.c,
            target_slope: v,
            deriv_at_c: Some(deriv_at_c),
            residual: Some(residual),
            tolerance: Some(tolerance),
            scale,
            constant_on_grid: mvt.constant_on_grid,
        },
        bracket: (alpha, beta),
        branch,
        x,
    })
}
