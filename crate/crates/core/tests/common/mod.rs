#![allow(dead_code)]

use fincr::{catalog_lookup, Fn1D, Rational};
use num::traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `n/d` with `|n| <= num_max`, `1 <= d <= den_max`.
pub fn rational(rng: &mut ChaCha8Rng, num_max: i64, den_max: i64) -> Rational {
    q(rng.gen_range(-num_max..=num_max), rng.gen_range(1..=den_max))
}

/// Random polynomial of exactly the given degree, ascending coefficients.
pub fn poly_coeffs(rng: &mut ChaCha8Rng, degree: usize) -> Vec<Rational> {
    let mut c: Vec<Rational> = (0..=degree).map(|_| rational(rng, 9, 7)).collect();
    while c[degree].is_zero() {
        c[degree] = rational(rng, 9, 7);
    }
    c
}

pub fn poly_fn(coeffs: &[Rational]) -> Fn1D {
    catalog_lookup("poly", coeffs).expect("poly is in the catalog")
}

/// Random rational interval `[a, b]` with `a < b`.
pub fn interval(rng: &mut ChaCha8Rng) -> (Rational, Rational) {
    loop {
        let a = rational(rng, 20, 9);
        let b = rational(rng, 20, 9);
        if a < b {
            return (a, b);
        }
        if b < a {
            return (b, a);
        }
    }
}

/// Horner evaluation, written independently of the library.
pub fn horner(coeffs: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn horner_f64(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn derivative_coeffs(coeffs: &[Rational]) -> Vec<Rational> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer((i as i64).into())).collect()
}

pub fn to_f64(q: &Rational) -> f64 {
    use num::traits::ToPrimitive;
    q.to_f64().expect("small rationals convert")
}

pub fn abs(q: &Rational) -> Rational {
    Signed::abs(q)
}

/// The Cantor function at `k / 3^m` through its ternary digits: digits 0 and
/// 2 become binary 0 and 1, and the first digit 1 contributes a final 1.
pub fn cantor_digit_map(k: u64, m: u32) -> Rational {
    let den = 3u64.pow(m);
    if k == den {
        return q(1, 1);
    }
    let mut digits = Vec::with_capacity(m as usize);
    let mut rest = k;
    for _ in 0..m {
        digits.push(rest % 3);
        rest /= 3;
    }
    digits.reverse();
    let mut value = Rational::zero();
    let mut weight = q(1, 2);
    for d in digits {
        match d {
            0 => {}
            2 => value += weight.clone(),
            _ => return value + weight,
        }
        weight = weight / q(2, 1);
    }
    value
}
