use thiserror::Error;

/// Errors produced by the solvers, generators and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch {
        expected: crate::Field,
        found: crate::Field,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{}matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})", index.map(|i| format!("form {i}: ")).unwrap_or_default())]
    NotPsd {
        index: Option<usize>,
        min_eigenvalue: f64,
    },

    #[error("matrix is not positive definite (eigenvalues span [{min:e}, {max:e}])")]
    NotPositiveDefinite { min: f64, max: f64 },

    #[error("form {index} has non-positive inner product {value:e} with the density matrix")]
    DegenerateInnerProduct { index: usize, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("closed form is singular at n = {n}, k = {k}")]
    FormulaSingular { n: usize, k: usize },

    #[error("{count} index subsets exceeds the enumeration limit {limit}")]
    TooManySubsets { count: u128, limit: u128 },

    #[error("moment vector yields numerically zero rounding covariance for every direction")]
    DegenerateMoments,

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
