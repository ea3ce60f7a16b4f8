use thiserror::Error;

/// Failures raised anywhere in the pipeline.
///
/// The CLI maps [`Error::is_input_error`] to exit status 2 and everything
/// else to exit status 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("iterative reduction did not converge: {0}")]
    NonConvergence(String),

    #[error("matrix is numerically singular: {0}")]
    SingularMatrix(String),

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotSemidefinite { min_eigenvalue: f64 },

    #[error("matrix is not Hermitian (relative skew part {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("E has numerical rank zero and A is singular: pencil is not regular")]
    AllRankDeficient,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("argument outside domain: {0}")]
    DomainError(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("too few points: need {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error("dimension {dim} exceeds limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed or out-of-contract input, as opposed
    /// to numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::HypothesisViolated(_)
                | Error::DegenerateInput(_)
                | Error::DomainError(_)
                | Error::DimensionMismatch(_)
                | Error::NonFinite
                | Error::TooFewPoints { .. }
                | Error::ParseError { .. }
                | Error::DimensionLimit { .. }
                | Error::Io(_)
                | Error::Json(_)
                | Error::NotSemidefinite { .. }
                | Error::NotPositiveDefinite { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
