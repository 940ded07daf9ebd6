use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("row {row} does not conform to schema of table `{table}`: {reason}")]
    SchemaMismatch {
        table: String,
        row: usize,
        reason: String,
    },

    #[error("row position {0} out of range")]
    RowOutOfRange(usize),

    #[error("unknown attribute `{attribute}` on table `{table}`")]
    UnknownAttribute { table: String, attribute: String },

    #[error("unsupported index pairing: {kind} on {table}.{attribute} ({field_kind})")]
    UnsupportedIndex {
        kind: String,
        table: String,
        attribute: String,
        field_kind: String,
    },

    #[error("document frequency mismatch for word `{word}`: df={df}, postings={postings}")]
    DfMismatch {
        word: String,
        df: u32,
        postings: usize,
    },

    #[error("{operation} is not available for representation {kind}")]
    UnsupportedOperation {
        operation: &'static str,
        kind: &'static str,
    },

    #[error("duplicate url `{0}`")]
    DuplicateUrl(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid corpus statistics: {0}")]
    InvalidStats(String),

    #[error("corpus parse error at line {line}: {reason}")]
    CorpusFormat { line: usize, reason: String },

    #[error("corrupt index file: {0}")]
    Corrupt(String),

    #[error("representations disagree: {0}")]
    Disagreement(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
