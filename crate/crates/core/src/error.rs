use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("estimated work {estimated} exceeds the bound {bound}")]
    WorkBoundExceeded { estimated: u128, bound: u128 },

    #[error("factorization does not satisfy the monodromy equation")]
    EquationViolated,

    #[error("graph sum {0} is not an integer")]
    NonIntegral(String),

    #[error("contour radii must satisfy max|z| < r_1 < ... < r_b < min|w|: {0}")]
    InvalidRadii(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric contraction too large: {0}")]
    ContractionTooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
