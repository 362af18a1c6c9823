//! Error type shared by every module in the crate.

use crate::render::Language;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Token minting ran out of unused identifiers for the configured length range.
    #[error("identifier space exhausted after {attempts} attempts (length range {lo}..={hi})")]
    IdSpaceExhausted { attempts: u32, lo: usize, hi: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("duplicate node id {0:?}")]
    DuplicateId(String),

    #[error("unknown node id {0:?}")]
    UnknownId(String),

    #[error("value {0:?} does not occur in the document")]
    UnknownValue(String),

    #[error("section index {0:?} does not name a section")]
    UnknownSection(String),

    #[error("operation does not support the {0} format")]
    UnsupportedLanguage(Language),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("grammar violation at line {line}: {message}")]
    Grammar { line: usize, message: String },

    #[error("document has no corruption site for {0}")]
    NotCorruptible(Language),

    /// The drawn document cannot support the task; the caller re-rolls.
    #[error("task not generable for this document: {0}")]
    NotGenerable(String),

    #[error("task {task}: no generable document after {attempts} attempts")]
    Ungenerable { task: String, attempts: u32 },

    #[error("malformed suite record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("audit failed: {0} of {1} samples did not re-derive")]
    AuditFailed(usize, usize),

    #[error("prompt template error: {0}")]
    Template(String),

    #[error("demo pool unusable: {0}")]
    DemoPool(String),

    #[error("endpoint rejected credentials (http {0})")]
    AuthFailed(u16),

    #[error("endpoint failure: {0}")]
    Endpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
