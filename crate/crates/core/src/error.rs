use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input")]
    Empty,

    #[error("negative count {value} at index {index}")]
    NegativeCount { index: usize, value: f64 },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("prior strength must be positive, got {0}")]
    InvalidStrength(f64),

    #[error("point is not on the probability simplex")]
    NotOnSimplex,

    #[error("argument {value} outside domain: {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("summand declared {declared} but its derivative is not monotone accordingly")]
    CurvatureMismatch { declared: &'static str },

    #[error("derivative bound is unbounded for component {index}")]
    UnboundedDerivative { index: usize },

    #[error("operands were computed on different problems: {0}")]
    Incompatible(&'static str),

    #[error("operand lacks a non-negativity certificate")]
    NotCertifiedNonNegative,

    #[error("ragged table: row {row} has {got} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, got: usize },

    #[error("zero cell ({row}, {col}) in posterior mean")]
    ZeroCell { row: usize, col: usize },

    #[error("lattice has {points} points, above the cap of {cap}")]
    LatticeTooLarge { points: u128, cap: u128 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
