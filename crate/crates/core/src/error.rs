use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("polynomial has no coefficients")]
    EmptyPolynomial,
    #[error("leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("arity mismatch: expected {expected} arguments, found {found}")]
    ArityMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("{value} is outside the coloring domain {domain}")]
    OutOfDomain { value: String, domain: String },
    #[error("invalid coloring: {0}")]
    Invalid(String),
    #[error("unknown coloring {0:?}")]
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("unknown pattern {0:?}")]
    Unknown(String),
    #[error("assignment has {found} values, pattern {pattern} has arity {expected}")]
    Arity {
        pattern: String,
        expected: usize,
        found: usize,
    },
    #[error("assignment violates constraint: {0}")]
    Constraint(String),
    #[error("invalid pattern: {0}")]
    Invalid(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Errors surfaced by searches, checkers, and the constructive pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("rejected input: {0}")]
    Rejected(String),
    #[error("sat: {0}")]
    Sat(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
