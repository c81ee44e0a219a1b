//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different prime contexts")]
    ContextMismatch,
    #[error("value has negative p-adic valuation (not in Z_p)")]
    NegativeValuation,
    #[error("argument is not coprime to p")]
    NotCoprime,
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("character modulus shares a factor with p")]
    ModulusSharesFactorWithP,
    #[error("constant term is not a unit, series not invertible")]
    NonUnitConstantTerm,
    #[error("operation requires level/weight/character metadata")]
    MissingMetadata,
    #[error("prime {0} is not admissible for this operator")]
    BadPrime(u64),
    #[error("character parity does not match the weight")]
    ParityViolation,
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,
    #[error("q-expansion truncation too short (need at least {needed} coefficients, have {have})")]
    TruncationTooShort { needed: usize, have: usize },
    #[error("vector lies outside the span; residual valuation {residual_valuation}")]
    NotInSpan { residual_valuation: u32 },
    #[error("basis is not stable under the operator (row {row} escapes the span)")]
    NotStable { row: usize },
    #[error("missing classical source for layer {layer}")]
    MissingSource { layer: usize },
    #[error("rank deficiency while building layered basis: {0}")]
    RankDeficiency(String),
    #[error("iteration of U_p powers did not stabilize within {0} steps")]
    NoStabilization(u64),
    #[error("denominator alpha - beta is not a unit")]
    DenominatorNotUnit,
    #[error("twist value undefined at {0}")]
    TwistUndefined(u64),
    #[error("malformed file: {0}")]
    FormatError(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
