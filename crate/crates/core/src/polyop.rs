//! The derivative operator `D` on `R_n[x]`, polynomials of degree at most `n`.
//!
//! `D` has the constants as kernel and rank `n`, so it is not surjective:
//! `x^n` is not the derivative of anything of degree `<= n`. All arithmetic
//! is exact.

use std::fmt;

use num::traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Coefficient `i` multiplies `x^i`; trailing zeros are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        if coeffs.is_empty() {
            Self::zero()
        } else {
            Self { coeffs }
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![Rational::zero()] }
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = Rational::one();
        Self { coeffs }
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Coefficients padded or truncated to length `n + 1`.
    pub fn coords(&self, n: usize) -> Vec<Rational> {
        (0..=n).map(|i| self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    /// The primitive with zero constant term.
    pub fn primitive(&self) -> Self {
        let mut coeffs = vec![Rational::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c / Rational::from_integer((i + 1).into())),
        );
        Self { coeffs }
    }

    /// Equality as elements of `R[x]`, ignoring trailing zeros.
    pub fn same_as(&self, other: &Poly) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        self.coords(n) == other.coords(n)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*x"),
                _ => format!("({c})*x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Matrix of `D` in the monomial basis `1, x, ..., x^n`: column `j` holds
/// the coordinates of `D(x^j) = j x^(j-1)`.
pub fn d_matrix(n: usize) -> Matrix {
    let mut m = vec![vec![Rational::zero(); n + 1]; n + 1];
    for j in 1..=n {
        m[j - 1][j] = Rational::from_integer(j.into());
    }
    m
}

pub fn apply(m: &Matrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

/// Reduced row echelon form; returns the pivot columns.
fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in 0..cols {
                    let delta = &factor * &m[r][j];
                    m[i][j] = &m[i][j] - delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    rref(&mut m.clone()).len()
}

/// Basis of the null space of `m`, one vector per free column.
pub fn null_space(m: &Matrix) -> Vec<Vec<Rational>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut reduced = m.clone();
    let pivots = rref(&mut reduced);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[row][free].clone();
            }
            v
        })
        .collect()
}

/// Basis of `ker D` on `R_n[x]`, computed from the matrix.
pub fn kernel_basis(n: usize) -> Vec<Poly> {
    null_space(&d_matrix(n)).into_iter().map(Poly::new).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveQuery {
    pub exists: bool,
    pub primitive: Option<Poly>,
}

/// Whether `p` lies in the image of `D` on `R_n[x]`, with a preimage if so.
pub fn has_primitive(p: &Poly, n: usize) -> Result<PrimitiveQuery> {
    match p.degree() {
        Some(d) if d > n => Err(Error::DegreeExceedsSpace { degree: d, n }),
        Some(d) if d == n => Ok(PrimitiveQuery { exists: false, primitive: None }),
        _ => {
            let prim = Poly::new(p.primitive().coords(n));
            Ok(PrimitiveQuery { exists: true, primitive: Some(prim) })
        }
    }
}
