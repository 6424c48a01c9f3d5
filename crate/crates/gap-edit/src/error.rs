use thiserror::Error;

pub type Result<T> = std::result::Result<T, GapError>;

#[derive(Debug, Error)]
pub enum GapError {
    /// Caller violated a precondition (bad lengths, shifts outside S, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// Two indexes cannot be combined; names the first mismatched field.
    #[error("incompatible indexes: field `{field}` differs ({left} vs {right})")]
    Incompatible {
        field: &'static str,
        left: String,
        right: String,
    },

    #[error("malformed index file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GapError {
    pub fn usage(msg: impl Into<String>) -> Self {
        GapError::Usage(msg.into())
    }

    pub fn incompatible(field: &'static str, left: impl ToString, right: impl ToString) -> Self {
        GapError::Incompatible {
            field,
            left: left.to_string(),
            right: right.to_string(),
        }
    }
}
