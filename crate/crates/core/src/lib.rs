//! Constructive real analysis on the finite-increment theorems.
//!
//! Every algorithm works on a [`Fn1D`](realfn::Fn1D) and, where the function
//! allows it, in exact rational arithmetic as well as in `f64`.

pub mod cantor;
pub mod cli;
pub mod error;
pub mod export;
pub mod expr;
pub mod inequalities;
pub mod polyop;
pub mod realfn;
pub mod scalar;
pub mod slope;
pub mod theoremgraph;
pub mod witness;

pub use error::{Error, Result};
pub use realfn::{catalog, catalog_lookup, eval_at, Fn1D, Interval};
pub use scalar::{NumericMode, Rational, Scalar};
