use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index {index} out of bounds (valid range 1..={bound})")]
    IndexOutOfBounds { index: usize, bound: usize },

    #[error("index tuple must be strictly increasing: {0:?}")]
    NotIncreasing(Vec<usize>),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("order {order} out of range (valid range {min}..={max})")]
    OrderOutOfRange { order: usize, min: usize, max: usize },

    #[error("compound too large: {entries} entries exceeds cap {cap}")]
    CompoundTooLarge { entries: u128, cap: u128 },

    #[error("matrix is singular")]
    Singular,

    #[error("image condition violated: {0}")]
    ImageCondition(String),

    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("zero column at index {0}")]
    ZeroColumn(usize),

    #[error("zero scale entry at index {0}")]
    ZeroScale(usize),

    #[error("point {0} outside [0, 1]")]
    PointOutOfDomain(f64),

    #[error("derivative order {0} unsupported by this family")]
    DerivativeUnsupported(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    NumericFailure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
