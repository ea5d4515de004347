use thiserror::Error;

/// Errors produced by graph construction, queries, and persistence.
#[derive(Debug, Error)]
pub enum KgError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A caller passed a node id that does not exist in the graph.
    #[error("unknown node id {0}")]
    InvalidNodeId(u32),

    #[error("invalid build input: {0}")]
    InvalidInput(String),

    #[error("graph format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("graph digest mismatch: header says {header}, body hashes to {actual}")]
    DigestMismatch { header: String, actual: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl KgError {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        KgError::Format {
            line,
            message: message.into(),
        }
    }
}
