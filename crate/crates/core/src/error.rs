use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the numerical core. Numeric payloads are stored as
/// `f64` so the type does not depend on the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("coordinate {index} must be a finite non-negative number, got {value}")]
    InvalidCoordinate { index: usize, value: f64 },

    #[error("exponent alpha = {alpha} is not admissible: {reason}")]
    InvalidExponent { alpha: f64, reason: &'static str },

    #[error("n = {n} is not supported: {reason}")]
    InvalidDimension { n: usize, reason: &'static str },

    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("P_alpha = G_n = 0 for a negative exponent with a zero coordinate; the ratio tends to -inf")]
    DegenerateZero,

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("maximum number of iterations ({0}) reached")]
    MaxIterations(usize),

    #[error("sum {sum} and product {prod} violate sum^3 > 27 prod: only the constant triple satisfies them")]
    ConstraintDegenerate { sum: f64, prod: f64 },

    #[error("instance mismatch: {0}")]
    InstanceMismatch(String),

    #[error("reference bound violated: {0}")]
    ReferenceBoundViolated(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }
}
