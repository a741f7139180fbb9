use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{what} index {index} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },
    #[error("output column {0} coincides with an input")]
    OutputAliasesInput(usize),
    #[error("operation spans partitions {0} and {1}")]
    PartitionSpan(usize, usize),
    #[error("two operations target partition {0} in the same step")]
    PartitionConflict(usize),
    #[error("column footprint {needed} exceeds available width {available}")]
    Footprint { needed: usize, available: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("unsupported number format: {0}")]
    Format(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
