use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants are grouped loosely by the module that raises them; every public
/// operation in the crate returns this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // function model
    #[error("invalid interval [{lo}, {hi}]: need lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("unknown catalog function `{0}`")]
    UnknownName(String),
    #[error("`{name}` expects {expected} parameter(s), got {got}")]
    BadArity { name: String, expected: String, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point {x} is outside the domain of `{name}`")]
    DomainViolation { name: String, x: f64 },
    #[error("`{0}` cannot be evaluated in exact rational mode")]
    NotExact(String),
    #[error("`{0}` has no derivative oracle")]
    MissingDerivOracle(String),

    // expressions
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("abs(...) is evaluate-only and cannot be differentiated")]
    DifferentiateAbs,

    // slopes
    #[error("slope needs two distinct points")]
    EqualPoints,
    #[error("expected x < a < y")]
    OrderingViolated,

    // witnesses
    #[error("f(a) = f(b): no dichotomy witness exists for a zero increment")]
    EqualEndpointValues,
    #[error("endpoint values have the wrong orientation for the requested sign")]
    WrongOrientation,
    #[error("halving rule failed at level {level}: neither half keeps the increment bound")]
    NumericalBreakdown { level: usize },
    #[error("no admissible step above the floor near t = {t}")]
    StepFloorReached { t: f64 },
    #[error("endpoint values differ; Rolle's hypothesis fails")]
    EndpointsNotEqual,
    #[error("no interior extremum certified: {0}")]
    NoInteriorExtremum(String),
    #[error("target value {v} is not bracketed by the derivative range samples")]
    TargetNotBracketed { v: f64 },

    // inequalities
    #[error("k must be nonnegative")]
    NegativeK,
    #[error("bounds must satisfy m <= M")]
    BadBounds,
    #[error("functions do not share the domain of the interval")]
    DomainMismatch,

    // staircase
    #[error("x = {0} lies outside [0, 1]")]
    OutOfUnitInterval(f64),
    #[error("level {0} exceeds the maximum of 30")]
    LevelTooDeep(u32),
    #[error("tolerance {0} needs more than 30 levels")]
    TolTooSmall(f64),

    // polynomial operator
    #[error("polynomial degree {degree} exceeds the space bound {n}")]
    DegreeExceedsSpace { degree: usize, n: usize },

    // theorem graph
    #[error("unknown statement `{0}`")]
    UnknownStatement(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
