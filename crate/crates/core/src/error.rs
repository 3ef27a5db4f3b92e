use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("degree cap exceeded: extension degree {degree} is above the cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("enumeration budget exceeded: {candidates} candidate tuples, budget {budget}")]
    Budget { candidates: u128, budget: u128 },
    #[error("at degree {degree}: {source}")]
    AtDegree {
        degree: u32,
        #[source]
        source: Box<Error>,
    },
    #[error("underdetermined: {0}")]
    Underdetermined(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("root finding failed: {0}")]
    Roots(String),
    #[error("{0}")]
    Separation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("pole at s = {0}")]
    Pole(String),
    #[error("bad prime {p} has no replacement fiber")]
    ExcludedPrime { p: u64 },
    #[error("bad primes without replacement below the cutoff: {0:?}")]
    UnhandledBadPrimes(Vec<u64>),
    #[error("cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
