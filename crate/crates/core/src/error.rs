use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("radicand {0} is not a square-free integer >= 2")]
    NotSquareFree(String),
    #[error("value is rational (zero coefficient on the square root)")]
    Rational,
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("square root of negative integer {0}")]
    NegativeSqrt(String),
    #[error("expected a positive value, got {0}")]
    NotPositive(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("continued fraction period not found within {0} iterations")]
    PeriodNotFound(usize),
    #[error("value {0} does not fit the target integer type")]
    Overflow(String),
    #[error("invalid representation {digits:?} in {system}")]
    InvalidRepresentation { system: String, digits: Vec<u32> },
    #[error("symbol {symbol:?} outside alphabet {alphabet}")]
    SymbolOutOfRange { symbol: Vec<u32>, alphabet: String },
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(String, String),
    #[error("automata overlap: parts {0} and {1} both accept input {2:?}")]
    Overlap(usize, usize, Vec<u32>),
    #[error("relation `{relation}` exceeded the state cap of {cap}")]
    StateCap { relation: String, cap: usize },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("malformed automaton file, line {line}: {msg}")]
    Format { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
