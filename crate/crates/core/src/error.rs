use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime (or exceeds the 2^16 cap)")]
    NotPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system is inconsistent (column {column} of the right-hand side)")]
    Inconsistent { column: usize },
    #[error("coefficient kind mismatch: {0}")]
    KindMismatch(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("independent term is not invertible, so the series has no inverse")]
    NotAUnit,
    #[error("polynomial has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("read at {index:?} lies inside N^n but outside the box extents {extents:?}")]
    OutOfWindow { index: Vec<i64>, extents: Vec<usize> },
    #[error("extents {extents:?} are not divisible by {factor}")]
    NotDivisible { extents: Vec<usize>, factor: usize },
    #[error("support of h exceeds the bound (p-1)*D = {bound}")]
    DegreeTooLarge { bound: i64 },
    #[error("no kernel inclusion found up to s_max = {s_max}; kernel dimensions {kernel_dims:?}")]
    SearchExhausted { s_max: u32, kernel_dims: Vec<usize> },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("box of {cells} cells exceeds the cap of 2^26 cells")]
    BoxTooLarge { cells: u128 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
