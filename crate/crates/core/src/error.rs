use thiserror::Error;

/// Errors produced while parsing equations, configuring runs, or evaluating.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("variable x{missing} does not appear although the equation uses x{arity}")]
    ArityGap { missing: usize, arity: usize },

    #[error("power must be at least 1 (position {position})")]
    InvalidPower { position: usize },

    #[error("variable index must be at least 1 (position {position})")]
    InvalidVariable { position: usize },

    #[error("integer literal out of range at position {position}")]
    LiteralOverflow { position: usize },

    #[error("equation has no terms")]
    EmptyEquation,

    #[error("chromosome has {genes} genes but the equation needs {arity}")]
    TooFewGenes { genes: usize, arity: usize },

    #[error("arithmetic overflow while evaluating the equation")]
    Overflow,

    #[error("gene range ({lower_exclusive}, {upper_inclusive}] is empty")]
    EmptyRange {
        lower_exclusive: i64,
        upper_inclusive: i64,
    },

    #[error("position {position} out of bounds for chromosome of length {len}")]
    PositionOutOfBounds { position: usize, len: usize },

    #[error("crossover point {point} must lie in 1..{len}")]
    CrossoverPoint { point: usize, len: usize },

    #[error("parents differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("search space of {size} tuples exceeds the budget of {budget}")]
    BudgetExceeded { size: u128, budget: u128 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
