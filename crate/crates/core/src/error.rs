use thiserror::Error;

/// Errors raised by the lattice, transform, moduli and zeta routines.
///
/// Variants split into two families: input validation failures (the caller
/// handed us something outside an operation's domain) and computation
/// failures (a search budget ran out or a postcondition did not hold).
/// [`Error::is_input_error`] tells them apart.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("gram matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("gram matrix is degenerate (determinant 0)")]
    Degenerate,
    #[error("lattice is not even: diagonal entry {index} is odd")]
    NotEven { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis rows are linearly dependent")]
    DependentRows,
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("p = 2 is not supported; only odd characteristic is handled")]
    CharacteristicTwo,
    #[error("odd self-intersection {0}; c1^2/2 is not integral")]
    OddSelfIntersection(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("step budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl Error {
    /// True for validation failures, false for computation failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::BudgetExhausted(_) | Error::SearchExhausted(_) | Error::Assertion(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
