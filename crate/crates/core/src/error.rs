use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: |m[{row}][{col}] - m[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },

    #[error("matrix is singular after ridging (pivot {pivot:e} at position {index})")]
    Singular { index: usize, pivot: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension mismatch: {what} (expected {expected}, found {found})")]
    DimensionMismatch { what: String, expected: usize, found: usize },

    #[error("index {index} out of range for ground set of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("ground set of size {n} exceeds the enumeration limit of {max}")]
    SizeLimit { n: usize, max: usize },

    #[error("ground set of size {n} exceeds the dense eigendecomposition limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("requested k = {k} exceeds the numerical rank {rank}")]
    Rank { k: usize, rank: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset `{0}` has no gold labels")]
    MissingLabels(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
