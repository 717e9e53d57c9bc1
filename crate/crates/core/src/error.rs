use thiserror::Error;

/// Errors raised at the boundary of every public operation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension N={0} is not supported (need N >= 2)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected N={expected}, found N={found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("symbol {symbol} out of range 1..={max}")]
    SymbolOutOfRange { symbol: usize, max: usize },

    #[error("edge endpoints must be distinct (got {0} and {0})")]
    DegenerateEdge(usize),

    #[error("degenerate simplex: vertices are affinely dependent")]
    DegenerateSimplex,

    #[error("matrix is singular")]
    Singular,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
