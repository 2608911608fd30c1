use thiserror::Error;

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("salt must not be empty")]
    EmptySalt,
    #[error("block message must not be empty")]
    EmptyMessage,
    #[error("invalid timestamp {0:?}: expected RFC 3339")]
    InvalidTimestamp(String),
    #[error("rebuild index {index} out of range for ledger of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LedgerError>;
