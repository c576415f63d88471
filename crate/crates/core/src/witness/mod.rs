//! Certificate-producing constructions: dichotomy traces, ε-chains and the
//! Rolle / mean-value / Darboux witnesses.

mod chain;
mod dichotomy;
mod extremum;

pub use chain::{epsilon_chain, epsilon_chain_abs, ChainBound, EpsilonChain, INITIAL_STEP_FRACTION};
pub use dichotomy::{
    fcd_witness, fcd_witness_with_rule, iaf_refute, lagrange_witness, lagrange_witness_with_rule, BisectionTrace,
    DerivCheck, HalvingRule, Measure, Orientation, Stationarity, DERIV_CHECK_TOL, STATIONARY_RUN,
};
pub use extremum::{
    darboux_witness, darboux_witness_with, mvt_witness, mvt_witness_with, rolle_witness, rolle_witness_with,
    DarbouxBranch, DarbouxWitness, ExtremumParams, Witness, BISECT_TOL, ENDPOINT_TOL, RESIDUAL_TOL,
};
