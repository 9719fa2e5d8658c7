use thiserror::Error;

/// Errors raised by tensor construction, shapes and graph operations.
#[derive(Debug, Error)]
pub enum TensorError {
    /// Incompatible shapes for an operation; names both offending shapes.
    #[error("dimension error in {op}: {lhs:?} vs {rhs:?}")]
    Dim {
        op: &'static str,
        lhs: Vec<usize>,
        rhs: Vec<usize>,
    },

    /// A configuration value outside its legal range.
    #[error("config error: {0}")]
    Config(String),

    /// Misuse of the autodiff API (e.g. backward on a non-scalar).
    #[error("usage error: {0}")]
    Usage(String),

    /// Non-finite values where finite input is required.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Checkpoint container parse/format failures.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl TensorError {
    pub fn dim(op: &'static str, lhs: &[usize], rhs: &[usize]) -> Self {
        TensorError::Dim {
            op,
            lhs: lhs.to_vec(),
            rhs: rhs.to_vec(),
        }
    }
}

pub type Result<T> = std::result::Result<T, TensorError>;
