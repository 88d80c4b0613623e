use thiserror::Error;

/// Errors raised by the exact-arithmetic layers and the verification suites.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of order {0} exceeds the supported table size")]
    FieldTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported level {0}: only monic polynomials of degree 1 are supported")]
    UnsupportedLevel(String),
    #[error("series in `{left}` and `{right}` cannot be combined")]
    VariableMismatch { left: String, right: String },
    #[error("series is zero to its truncation order t^{0} and cannot be inverted")]
    NotInvertible(i64),
    #[error("substituted series must have positive valuation, got {0}")]
    BadSubstitution(i64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("level {0} is not separable for this A-field (gamma(a) = 0)")]
    BadLevel(String),
    #[error("torsion not split within the extension bound: {0}")]
    IncreaseExtension(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
