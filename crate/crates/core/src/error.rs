use thiserror::Error;

/// Errors raised by field construction, subspace algebra, graph building and
/// the verification drivers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("division by zero in the field")]
    DivisionByZero,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("ambient dimension mismatch ({0} vs {1})")]
    AmbientMismatch(usize, usize),

    #[error("field mismatch (q = {0} vs q = {1})")]
    FieldMismatch(u32, u32),

    #[error("coordinate index {index} out of range for ambient dimension {ambient}")]
    IndexOutOfRange { index: usize, ambient: usize },

    #[error("vertex id {id} out of range for a graph with {len} vertices")]
    IdOutOfRange { id: u64, len: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
