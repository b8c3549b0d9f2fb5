use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the public
/// operations: sizing/memory refusals, argument range problems, non-finite
/// arithmetic, analytic domain violations, and input-file defects.
#[derive(Debug, Error)]
pub enum Error {
    /// Requested allocation or limit exceeds the documented bound.
    #[error("size error: {0}")]
    Size(String),
    /// Argument outside the valid integer range of an operation.
    #[error("range error: {0}")]
    Range(String),
    /// A computation produced a non-finite value.
    #[error("overflow error: {0}")]
    Overflow(String),
    /// Argument outside the analytic domain (e.g. Re s <= 0).
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation at a pole.
    #[error("pole error: {0}")]
    Pole(String),
    /// Evaluation refused near a removable singularity where the working
    /// formula is catastrophically ill-conditioned.
    #[error("conditioning error: {0}")]
    Conditioning(String),
    /// Requested accuracy is unreachable in double precision.
    #[error("precision error: {0}")]
    Precision(String),
    /// Root search failed inside the given bracket.
    #[error("zero not found: {0}")]
    ZeroNotFound(String),
    /// Malformed input file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    /// Structurally valid input that violates an invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// A truncation tail cannot be certified (no tail certificate and no
    /// closed form).
    #[error("uncertifiable tail: {0}")]
    UncertifiableTail(String),
    /// Invalid construction parameters (e.g. g_k with k not a prime power).
    #[error("construction error: {0}")]
    Construction(String),
    /// Caller violated a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
