//! Arithmetic expressions in one variable `x`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' exponent)?
//! exponent := '-'? INT | '(' '-'? INT ')'
//! primary  := NUMBER | 'x' | 'pi' | ('sin' | 'cos' | 'abs') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Exponents are integer literals only, so `x^(1/2)` and `x^2^3` are rejected.
//! Numbers are decimal literals (`3`, `0.25`, `1e-6`) and are kept as exact
//! rationals.

use std::fmt;
use std::sync::Arc;

use num::traits::Zero;

use crate::error::{Error, Result};
use crate::realfn::{Fn1D, Interval, RealMap};
use crate::scalar::{parse_rational, rational_to_f64, terminating_decimal, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Rational),
    X,
    Pi,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Abs(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: Rational, integer: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, start));
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let mut integer = true;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                integer = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    integer = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let value = parse_rational(&text[start..i]).map_err(|_| Error::SyntaxError {
                offset: start,
                message: format!("malformed number `{}`", &text[start..i]),
            })?;
            out.push((Tok::Num { value, integer }, start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(Error::SyntaxError { offset: start, message: format!("unexpected character `{ch}`") });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::SyntaxError { offset: self.offset(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exponent = self.exponent()?;
        if *self.peek() == Tok::Caret {
            return self.fail("exponent must be an integer literal");
        }
        Ok(Expr::Pow(Box::new(base), exponent))
    }

    fn exponent(&mut self) -> Result<i32> {
        let parens = *self.peek() == Tok::LParen;
        if parens {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let at = self.offset();
        let value = match self.bump() {
            Tok::Num { value, integer: true } => value,
            _ => return Err(Error::SyntaxError { offset: at, message: "exponent must be an integer literal".into() }),
        };
        let n: i32 = value
            .to_integer()
            .try_into()
            .map_err(|_| Error::SyntaxError { offset: at, message: "exponent out of range".into() })?;
        if parens {
            self.expect(Tok::RParen, "`)` closing the exponent")?;
        }
        Ok(if negative { -n } else { n })
    }

    fn primary(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::Num { value, .. } => Ok(Expr::Const(value)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::X),
                "pi" => Ok(Expr::Pi),
                "sin" | "cos" | "abs" => {
                    self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                    let arg = Box::new(self.expr()?);
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(match name.as_str() {
                        "sin" => Expr::Sin(arg),
                        "cos" => Expr::Cos(arg),
                        _ => Expr::Abs(arg),
                    })
                }
                _ => Err(Error::UnknownIdentifier { name, offset: at }),
            },
            Tok::End => Err(Error::SyntaxError { offset: at, message: "unexpected end of input".into() }),
            _ => Err(Error::SyntaxError { offset: at, message: "expected a number, `x`, a function or `(`".into() }),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::SyntaxError { offset: 0, message: "empty expression".into() });
    }
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("unexpected trailing input");
    }
    Ok(e)
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        match self {
            Const(q) => match terminating_decimal(q) {
                Some(s) if !s.starts_with('-') => f.write_str(&s),
                _ => write!(f, "({q})"),
            },
            X => f.write_str("x"),
            Pi => f.write_str("pi"),
            Add(l, r) | Sub(l, r) => {
                l.write_child(f, 1)?;
                f.write_str(if matches!(self, Add(..)) { " + " } else { " - " })?;
                r.write_child(f, 2)
            }
            Mul(l, r) | Div(l, r) => {
                l.write_child(f, 2)?;
                f.write_str(if matches!(self, Mul(..)) { "*" } else { "/" })?;
                r.write_child(f, 3)
            }
            Neg(e) => {
                f.write_str("-")?;
                e.write_child(f, 3)
            }
            Pow(b, n) => {
                b.write_child(f, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Sin(e) => write!(f, "sin({e})"),
            Cos(e) => write!(f, "cos({e})"),
            Abs(e) => write!(f, "abs({e})"),
        }
    }
}

fn domain(x: f64) -> Error {
    Error::DomainViolation { name: String::new(), x }
}

impl Expr {
    pub fn eval_f64(&self, x: f64) -> Result<f64> {
        use Expr::*;
        Ok(match self {
            Const(q) => rational_to_f64(q),
            X => x,
            Pi => std::f64::consts::PI,
            Add(l, r) => l.eval_f64(x)? + r.eval_f64(x)?,
            Sub(l, r) => l.eval_f64(x)? - r.eval_f64(x)?,
            Mul(l, r) => l.eval_f64(x)? * r.eval_f64(x)?,
            Div(l, r) => {
                let num = l.eval_f64(x)?;
                let den = r.eval_f64(x)?;
                if den == 0.0 {
                    return Err(domain(x));
                }
                num / den
            }
            Neg(e) => -e.eval_f64(x)?,
            Pow(b, n) => {
                let base = b.eval_f64(x)?;
                if base == 0.0 && *n < 0 {
                    return Err(domain(x));
                }
                base.powi(*n)
            }
            Sin(e) => e.eval_f64(x)?.sin(),
            Cos(e) => e.eval_f64(x)?.cos(),
            Abs(e) => e.eval_f64(x)?.abs(),
        })
    }

    pub fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        use Expr::*;
        Ok(match self {
            Const(q) => q.clone(),
            X => x.clone(),
            Pi | Sin(_) | Cos(_) => return Err(Error::NotExact(String::new())),
            Add(l, r) => l.eval_exact(x)? + r.eval_exact(x)?,
            Sub(l, r) => l.eval_exact(x)? - r.eval_exact(x)?,
            Mul(l, r) => l.eval_exact(x)? * r.eval_exact(x)?,
            Div(l, r) => {
                let num = l.eval_exact(x)?;
                let den = r.eval_exact(x)?;
                if den.is_zero() {
                    return Err(domain(rational_to_f64(x)));
                }
                num / den
            }
            Neg(e) => -e.eval_exact(x)?,
            Pow(b, n) => {
                let base = b.eval_exact(x)?;
                if base.is_zero() && *n < 0 {
                    return Err(domain(rational_to_f64(x)));
                }
                num::traits::Pow::pow(base, *n)
            }
            Abs(e) => num::traits::Signed::abs(&e.eval_exact(x)?),
        })
    }

    fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(q) => Some(q),
            _ => None,
        }
    }
}

// Constructors with literal folding.

fn konst(q: Rational) -> Expr {
    Expr::Const(q)
}

fn int(n: i64) -> Expr {
    konst(Rational::from_integer(n.into()))
}

fn is_value(e: &Expr, v: i64) -> bool {
    e.as_const().is_some_and(|q| *q == Rational::from_integer(v.into()))
}

fn add(l: Expr, r: Expr) -> Expr {
    match (l.as_const(), r.as_const()) {
        (Some(a), Some(b)) => konst(a + b),
        _ if is_value(&l, 0) => r,
        _ if is_value(&r, 0) => l,
        _ => Expr::Add(Box::new(l), Box::new(r)),
    }
}

fn sub(l: Expr, r: Expr) -> Expr {
    match (l.as_const(), r.as_const()) {
        (Some(a), Some(b)) => konst(a - b),
        _ if is_value(&r, 0) => l,
        _ if is_value(&l, 0) => neg(r),
        _ => Expr::Sub(Box::new(l), Box::new(r)),
    }
}

fn mul(l: Expr, r: Expr) -> Expr {
    match (l.as_const(), r.as_const()) {
        (Some(a), Some(b)) => konst(a * b),
        _ if is_value(&l, 0) || is_value(&r, 0) => int(0),
        _ if is_value(&l, 1) => r,
        _ if is_value(&r, 1) => l,
        _ => Expr::Mul(Box::new(l), Box::new(r)),
    }
}

fn div(l: Expr, r: Expr) -> Expr {
    match (l.as_const(), r.as_const()) {
        (Some(a), Some(b)) if !b.is_zero() => konst(a / b),
        _ if is_value(&r, 1) => l,
        _ => Expr::Div(Box::new(l), Box::new(r)),
    }
}

fn neg(e: Expr) -> Expr {
    match e.as_const() {
        Some(a) => konst(-a),
        None => Expr::Neg(Box::new(e)),
    }
}

fn pow(b: Expr, n: i32) -> Expr {
    match (b.as_const(), n) {
        (_, 0) => int(1),
        (_, 1) => b,
        (Some(a), n) if n > 0 || !a.is_zero() => konst(num::traits::Pow::pow(a.clone(), n)),
        _ => Expr::Pow(Box::new(b), n),
    }
}

/// Symbolic derivative with respect to `x`. Only literal arithmetic is folded.
pub fn differentiate(e: &Expr) -> Result<Expr> {
    use Expr::*;
    Ok(match e {
        Const(_) | Pi => int(0),
        X => int(1),
        Add(l, r) => add(differentiate(l)?, differentiate(r)?),
        Sub(l, r) => sub(differentiate(l)?, differentiate(r)?),
        Mul(l, r) => add(
            mul(differentiate(l)?, (**r).clone()),
            mul((**l).clone(), differentiate(r)?),
        ),
        Div(l, r) => div(
            sub(
                mul(differentiate(l)?, (**r).clone()),
                mul((**l).clone(), differentiate(r)?),
            ),
            pow((**r).clone(), 2),
        ),
        Neg(a) => neg(differentiate(a)?),
        Pow(b, n) => mul(
            mul(int(*n as i64), pow((**b).clone(), n - 1)),
            differentiate(b)?,
        ),
        Sin(a) => mul(Cos(a.clone()), differentiate(a)?),
        Cos(a) => neg(mul(Sin(a.clone()), differentiate(a)?)),
        Abs(_) => return Err(Error::DifferentiateAbs),
    })
}

struct ExprMap(Expr);

impl RealMap for ExprMap {
    fn eval_f64(&self, x: f64) -> Result<f64> {
        self.0.eval_f64(x)
    }

    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        self.0.eval_exact(x)
    }
}

/// Wraps an expression as a function on `domain`. The derivative oracle is
/// the symbolic derivative; expressions containing `abs` get none.
pub fn to_fn(e: &Expr, domain: Interval) -> Fn1D {
    let deriv = differentiate(e).ok().map(|d| Arc::new(ExprMap(d)) as Arc<dyn RealMap>);
    Fn1D::new(e.to_string(), domain, Arc::new(ExprMap(e.clone())), deriv)
}

/// Parses `text` and wraps it with [`to_fn`].
pub fn parse_fn(text: &str, domain: Interval) -> Result<Fn1D> {
    Ok(to_fn(&parse(text)?, domain))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(text: &str, x: f64) -> f64 {
        parse(text).unwrap().eval_f64(x).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(at("1+2*3", 0.3), 7.0);
        assert_eq!(at("8-3-2", 0.0), 3.0);
        assert_eq!(at("8/4/2", 0.0), 1.0);
        assert_eq!(at("-x^2", 3.0), -9.0);
        assert_eq!(at("(-x)^2", 3.0), 9.0);
        assert_eq!(at("2*-x", 3.0), -6.0);
        assert_eq!(at(" ( 1 +  x ) * 2 ", 1.0), 4.0);
        assert_eq!(at("x^-2", 2.0), 0.25);
        assert_eq!(at("x^(-2)", 2.0), 0.25);
        assert_eq!(at("pi", 0.0), std::f64::consts::PI);
        assert_eq!(at("0.5e1", 0.0), 5.0);
    }

    #[test]
    fn fpq_expression_shape() {
        let e = parse("x^2*sin(1/x^1)").unwrap();
        let expected = Expr::Mul(
            Box::new(Expr::Pow(Box::new(Expr::X), 2)),
            Box::new(Expr::Sin(Box::new(Expr::Div(
                Box::new(int(1)),
                Box::new(Expr::Pow(Box::new(Expr::X), 1)),
            )))),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("x^(1/2)") {
            Err(Error::SyntaxError { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x^2^3"), Err(Error::SyntaxError { offset: 3, .. })));
        assert!(matches!(parse("x^1.5"), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse("1 +"), Err(Error::SyntaxError { offset: 3, .. })));
        assert!(matches!(parse("(x"), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse("x x"), Err(Error::SyntaxError { offset: 2, .. })));
        assert!(matches!(parse("2 $ 3"), Err(Error::SyntaxError { offset: 2, .. })));
        assert!(matches!(parse(""), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse("sin x"), Err(Error::SyntaxError { .. })));
        match parse("1 + exp(x)") {
            Err(Error::UnknownIdentifier { name, offset }) => {
                assert_eq!((name.as_str(), offset), ("exp", 4));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn derivatives() {
        let d = differentiate(&parse("x^2").unwrap()).unwrap();
        for x in [-1.5, 0.0, 2.0] {
            assert_eq!(d.eval_f64(x).unwrap(), 2.0 * x);
        }
        let d = differentiate(&parse("sin(x)").unwrap()).unwrap();
        assert_eq!(d, parse("cos(x)").unwrap());
        assert!(matches!(differentiate(&parse("abs(x)").unwrap()), Err(Error::DifferentiateAbs)));
        let d = differentiate(&parse("3*x - 1/x").unwrap()).unwrap();
        assert!((d.eval_f64(2.0).unwrap() - 3.25).abs() < 1e-15);
    }

    #[test]
    fn to_fn_examples() {
        let f = parse_fn("x^3", Interval::unit()).unwrap();
        assert_eq!(f.eval_f64(0.5).unwrap(), 0.125);
        let f = parse_fn("1/x", Interval::unit()).unwrap();
        assert!(matches!(f.eval_f64(0.0), Err(Error::DomainViolation { .. })));
        let f = parse_fn("x^2*sin(1/x^1)", Interval::new(-1.0, 1.0).unwrap()).unwrap();
        assert!(matches!(f.eval_f64(0.0), Err(Error::DomainViolation { .. })));
        assert!(matches!(f.eval_f64(2.0), Err(Error::DomainViolation { .. })));
        let f = parse_fn("abs(x)", Interval::unit()).unwrap();
        assert!(!f.has_deriv());
    }

    #[test]
    fn exact_evaluation() {
        let e = parse("x^3 - 1/x + abs(-2)").unwrap();
        let q = Rational::new(1.into(), 2.into());
        assert_eq!(e.eval_exact(&q).unwrap(), Rational::new(1.into(), 8.into()));
        assert!(matches!(parse("sin(x)").unwrap().eval_exact(&q), Err(Error::NotExact(_))));
    }

    #[test]
    fn printing_reparses() {
        for text in ["x^2*sin(1/x^1)", "-(x - 1)^3", "1 - (2 - x)", "x/(2*x)", "--x", "x^(-3) + 0.25", "(x^2)^3"] {
            let e = parse(text).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{text} -> {e}");
        }
    }
}
