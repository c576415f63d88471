//! Real functions of one variable: intervals, evaluation oracles and the
//! catalog of named example functions.

use std::fmt;
use std::sync::Arc;

use num::traits::{One, ToPrimitive, Zero};
use num::{BigInt, Integer};

use crate::cantor;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// A closed interval `[lo, hi]` with `lo < hi`.
///
/// Domains may use infinite `f64` endpoints; intervals handed to the
/// algorithms are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<T = f64> {
    lo: T,
    hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo: lo.to_f64(), hi: hi.to_f64() })
        }
    }

    pub fn lo(&self) -> &T {
        &self.lo
    }

    pub fn hi(&self) -> &T {
        &self.hi
    }

    pub fn width(&self) -> T {
        self.hi.clone() - self.lo.clone()
    }

    pub fn midpoint(&self) -> T {
        (self.lo.clone() + self.hi.clone()).half()
    }

    pub fn contains(&self, x: &T) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn to_f64(&self) -> Interval<f64> {
        Interval { lo: self.lo.to_f64(), hi: self.hi.to_f64() }
    }
}

impl Interval<f64> {
    pub fn real_line() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    /// Membership test for a point of either backend, exact for rationals.
    pub fn contains_scalar<T: Scalar>(&self, x: &T) -> bool {
        let above = match T::from_f64(self.lo) {
            Some(lo) => &lo <= x,
            None => self.lo == f64::NEG_INFINITY,
        };
        let below = match T::from_f64(self.hi) {
            Some(hi) => x <= &hi,
            None => self.hi == f64::INFINITY,
        };
        above && below
    }

    /// Whether `other` (in any backend) lies inside this interval.
    pub fn covers<T: Scalar>(&self, other: &Interval<T>) -> bool {
        self.contains_scalar(other.lo()) && self.contains_scalar(other.hi())
    }
}

impl<T: fmt::Display> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A pure map ℝ → ℝ with a float oracle and, where the map is closed under
/// rational arithmetic, an exact one.
pub trait RealMap: Send + Sync {
    fn eval_f64(&self, x: f64) -> Result<f64>;

    fn eval_exact(&self, _x: &Rational) -> Result<Rational> {
        Err(Error::NotExact(String::new()))
    }
}

fn domain_error(x: f64) -> Error {
    Error::DomainViolation { name: String::new(), x }
}

/// An evaluable function with optional derivative oracle and domain.
#[derive(Clone)]
pub struct Fn1D {
    name: String,
    domain: Interval,
    map: Arc<dyn RealMap>,
    deriv: Option<Arc<dyn RealMap>>,
}

impl fmt::Debug for Fn1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fn1D")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("has_deriv", &self.deriv.is_some())
            .finish()
    }
}

impl Fn1D {
    pub fn new(
        name: impl Into<String>,
        domain: Interval,
        map: Arc<dyn RealMap>,
        deriv: Option<Arc<dyn RealMap>>,
    ) -> Self {
        Self { name: name.into(), domain, map, deriv }
    }

    /// Float-only function built from closures.
    pub fn from_fn<F>(name: impl Into<String>, domain: Interval, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, domain, Arc::new(ClosureMap(f)), None)
    }

    pub fn with_deriv_fn<F>(mut self, d: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.deriv = Some(Arc::new(ClosureMap(d)));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }

    pub fn has_deriv(&self) -> bool {
        self.deriv.is_some()
    }

    pub fn eval<T: Scalar>(&self, x: &T) -> Result<T> {
        if !self.domain.contains_scalar(x) {
            return Err(Error::DomainViolation { name: self.name.clone(), x: x.to_f64() });
        }
        T::map_eval(self.map.as_ref(), x).map_err(|e| self.tag(e))
    }

    pub fn deriv_at<T: Scalar>(&self, x: &T) -> Result<T> {
        let deriv = self
            .deriv
            .as_ref()
            .ok_or_else(|| Error::MissingDerivOracle(self.name.clone()))?;
        if !self.domain.contains_scalar(x) {
            return Err(Error::DomainViolation { name: self.name.clone(), x: x.to_f64() });
        }
        T::map_eval(deriv.as_ref(), x).map_err(|e| self.tag(e))
    }

    pub fn eval_f64(&self, x: f64) -> Result<f64> {
        self.eval(&x)
    }

    pub fn deriv_f64(&self, x: f64) -> Result<f64> {
        self.deriv_at(&x)
    }

    fn tag(&self, e: Error) -> Error {
        match e {
            Error::DomainViolation { name, x } if name.is_empty() => {
                Error::DomainViolation { name: self.name.clone(), x }
            }
            Error::NotExact(name) if name.is_empty() => Error::NotExact(self.name.clone()),
            other => other,
        }
    }

    /// `alpha * f(x) + beta * x + gamma`, derivative `alpha * f' + beta`.
    pub fn linear_combo(&self, name: impl Into<String>, alpha: f64, beta: f64, gamma: f64) -> Self {
        let make = |base: &Arc<dyn RealMap>, a, b, c| -> Arc<dyn RealMap> {
            Arc::new(LinearCombo::new(base.clone(), a, b, c))
        };
        Self {
            name: name.into(),
            domain: self.domain.clone(),
            map: make(&self.map, alpha, beta, gamma),
            deriv: self.deriv.as_ref().map(|d| make(d, alpha, 0.0, beta)),
        }
    }
}

/// Evaluates `f` at `x`; errors with `DomainViolation` outside the domain.
pub fn eval_at(f: &Fn1D, x: f64) -> Result<f64> {
    f.eval(&x)
}

struct ClosureMap<F>(F);

impl<F: Fn(f64) -> f64 + Send + Sync> RealMap for ClosureMap<F> {
    fn eval_f64(&self, x: f64) -> Result<f64> {
        Ok((self.0)(x))
    }
}

/// Dense polynomial, coefficient `i` multiplies `x^i`.
#[derive(Debug, Clone)]
pub struct PolyMap {
    exact: Vec<Rational>,
    float: Vec<f64>,
    /// `exact[i] = numers[i] / denom`.
    numers: Vec<BigInt>,
    denom: BigInt,
}

impl PolyMap {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let float = coeffs.iter().map(Scalar::to_f64).collect();
        let denom = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let numers = coeffs.iter().map(|c| c.numer() * (&denom / c.denom())).collect();
        Self { exact: coeffs, float, numers, denom }
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<Rational> = self
            .exact
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer((i as i64).into()))
            .collect();
        if coeffs.is_empty() {
            Self::new(vec![<Rational as Zero>::zero()])
        } else {
            Self::new(coeffs)
        }
    }
}

impl RealMap for PolyMap {
    fn eval_f64(&self, x: f64) -> Result<f64> {
        Ok(self.float.iter().rev().fold(0.0, |acc, c| acc * x + c))
    }

    /// Homogeneous Horner over integers with a single final reduction.
    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        let (p, q) = (x.numer(), x.denom());
        let mut numers = self.numers.iter().rev();
        let mut acc = numers.next().cloned().unwrap_or_default();
        let mut q_pow = BigInt::one();
        for c in numers {
            q_pow *= q;
            acc = acc * p + c * &q_pow;
        }
        Ok(Rational::new(acc, &self.denom * q_pow))
    }
}

struct SinMap;
struct CosMap;

impl RealMap for SinMap {
    fn eval_f64(&self, x: f64) -> Result<f64> {
        Ok(x.sin())
    }

    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        if Zero::is_zero(x) {
            Ok(<Rational as Zero>::zero())
        } else {
            Err(Error::NotExact(String::new()))
        }
    }
}

impl RealMap for CosMap {
    fn eval_f64(&self, x: f64) -> Result<f64> {
        Ok(x.cos())
    }
}

/// `x^p sin(1/x^q)`, extended by `0` at the origin.
struct FpqMap {
    p: i32,
    q: i32,
}

struct FpqDerivMap {
    p: i32,
    q: i32,
}

impl RealMap for FpqMap {
    fn eval_f64(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(x.powi(self.p) * x.powi(-self.q).sin())
    }

    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        if Zero::is_zero(x) {
            Ok(<Rational as Zero>::zero())
        } else {
            Err(Error::NotExact(String::new()))
        }
    }
}

impl RealMap for FpqDerivMap {
    fn eval_f64(&self, x: f64) -> Result<f64> {
        let (p, q) = (self.p, self.q);
        if x == 0.0 {
            // f(h)/h = h^(p-1) sin(1/h^q) -> 0 only when p > 1
            return if p >= 2 { Ok(0.0) } else { Err(domain_error(0.0)) };
        }
        let u = x.powi(-q);
        Ok(p as f64 * x.powi(p - 1) * u.sin() - q as f64 * x.powi(p - q - 1) * u.cos())
    }

    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        if Zero::is_zero(x) && self.p >= 2 {
            Ok(<Rational as Zero>::zero())
        } else {
            Err(Error::NotExact(String::new()))
        }
    }
}

struct StaircaseMap(u32);
struct StaircaseSlopeMap(u32);

impl RealMap for StaircaseMap {
    fn eval_f64(&self, x: f64) -> Result<f64> {
        cantor::staircase_eval(self.0, &x).map_err(|_| domain_error(x))
    }

    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        cantor::staircase_eval(self.0, x).map_err(|_| domain_error(Scalar::to_f64(x)))
    }
}

impl RealMap for StaircaseSlopeMap {
    fn eval_f64(&self, x: f64) -> Result<f64> {
        cantor::staircase_slope(self.0, &x)
    }

    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        cantor::staircase_slope(self.0, x)
    }
}

struct LinearCombo {
    base: Arc<dyn RealMap>,
    coeffs: [f64; 3],
    exact: Option<[Rational; 3]>,
}

impl LinearCombo {
    fn new(base: Arc<dyn RealMap>, alpha: f64, beta: f64, gamma: f64) -> Self {
        let exact = match (
            Rational::from_float(alpha),
            Rational::from_float(beta),
            Rational::from_float(gamma),
        ) {
            (Some(a), Some(b), Some(c)) => Some([a, b, c]),
            _ => None,
        };
        Self { base, coeffs: [alpha, beta, gamma], exact }
    }
}

impl RealMap for LinearCombo {
    fn eval_f64(&self, x: f64) -> Result<f64> {
        let [a, b, c] = self.coeffs;
        let fx = if a == 0.0 { 0.0 } else { self.base.eval_f64(x)? };
        Ok(a * fx + b * x + c)
    }

    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        let [a, b, c] = self.exact.as_ref().ok_or_else(|| Error::NotExact(String::new()))?;
        let fx = if Zero::is_zero(a) { <Rational as Zero>::zero() } else { self.base.eval_exact(x)? };
        Ok(a * fx + b * x + c)
    }
}

fn poly_fn(name: String, coeffs: Vec<Rational>) -> Fn1D {
    let map = PolyMap::new(coeffs);
    let deriv = map.derivative();
    Fn1D::new(name, Interval::real_line(), Arc::new(map), Some(Arc::new(deriv)))
}

fn small_int(name: &str, q: &Rational) -> Result<i64> {
    if !q.is_integer() {
        return Err(Error::InvalidParameter(format!("`{name}` needs integer parameters, got {q}")));
    }
    q.to_integer()
        .to_i64()
        .filter(|v| v.abs() <= 1 << 20)
        .ok_or_else(|| Error::InvalidParameter(format!("parameter {q} of `{name}` is too large")))
}

fn arity(name: &str, expected: &str, params: &[Rational], ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::BadArity { name: name.into(), expected: expected.into(), got: params.len() })
    }
}

fn join(params: &[Rational]) -> String {
    params.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Catalog names accepted by [`catalog_lookup`].
pub const CATALOG: &[&str] = &["identity", "affine", "monomial", "poly", "sin", "fpq", "cantor"];

/// Builds a named catalog function.
///
/// | name       | params          | function                         |
/// |------------|-----------------|----------------------------------|
/// | `identity` | none            | `x`                              |
/// | `affine`   | `m, c`          | `m x + c`                        |
/// | `monomial` | `p` (int ≥ 0)   | `x^p`                            |
/// | `poly`     | `c0, c1, …`     | `c0 + c1 x + …` (ascending)      |
/// | `sin`      | none            | `sin x`                          |
/// | `fpq`      | `p, q` (ints)   | `x^p sin(1/x^q)`, `0` at `0`     |
/// | `cantor`   | `n` (0..=30)    | level-`n` staircase on `[0, 1]`  |
///
/// `fpq` requires `p ≥ 1`; its derivative oracle is defined at `0` (with
/// value `0`) only when `p ≥ 2`.
pub fn catalog_lookup(name: &str, params: &[Rational]) -> Result<Fn1D> {
    match name {
        "identity" => {
            arity(name, "0", params, params.is_empty())?;
            Ok(poly_fn("identity".into(), vec![<Rational as Zero>::zero(), Scalar::one()]))
        }
        "affine" => {
            arity(name, "2", params, params.len() == 2)?;
            let coeffs = vec![params[1].clone(), params[0].clone()];
            Ok(poly_fn(format!("affine({})", join(params)), coeffs))
        }
        "monomial" => {
            arity(name, "1", params, params.len() == 1)?;
            let p = small_int(name, &params[0])?;
            if p < 0 {
                return Err(Error::InvalidParameter("monomial degree must be >= 0".into()));
            }
            let mut coeffs = vec![<Rational as Zero>::zero(); p as usize + 1];
            coeffs[p as usize] = Scalar::one();
            Ok(poly_fn(format!("monomial({p})"), coeffs))
        }
        "poly" => {
            arity(name, "at least 1", params, !params.is_empty())?;
            Ok(poly_fn(format!("poly({})", join(params)), params.to_vec()))
        }
        "sin" => {
            arity(name, "0", params, params.is_empty())?;
            Ok(Fn1D::new("sin", Interval::real_line(), Arc::new(SinMap), Some(Arc::new(CosMap))))
        }
        "fpq" => {
            arity(name, "2", params, params.len() == 2)?;
            let p = small_int(name, &params[0])? as i32;
            let q = small_int(name, &params[1])? as i32;
            if p < 1 {
                return Err(Error::InvalidParameter(format!(
                    "fpq needs p >= 1 (got {p}): the derivative at 0 is undefined"
                )));
            }
            if q < 1 {
                return Err(Error::InvalidParameter(format!("fpq needs q >= 1 (got {q})")));
            }
            Ok(Fn1D::new(
                format!("fpq({p},{q})"),
                Interval::real_line(),
                Arc::new(FpqMap { p, q }),
                Some(Arc::new(FpqDerivMap { p, q })),
            ))
        }
        "cantor" => {
            arity(name, "1", params, params.len() == 1)?;
            let n = small_int(name, &params[0])?;
            if !(0..=cantor::MAX_LEVEL as i64).contains(&n) {
                return Err(Error::LevelTooDeep(n.max(0) as u32));
            }
            let n = n as u32;
            Ok(Fn1D::new(
                format!("cantor({n})"),
                Interval::unit(),
                Arc::new(StaircaseMap(n)),
                Some(Arc::new(StaircaseSlopeMap(n))),
            ))
        }
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// Convenience for integer parameters.
pub fn catalog(name: &str, params: &[i64]) -> Result<Fn1D> {
    let params: Vec<Rational> = params.iter().map(|&p| Rational::from_integer(p.into())).collect();
    catalog_lookup(name, &params)
}
