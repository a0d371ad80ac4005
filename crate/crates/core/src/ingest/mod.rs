//! Tokenization, word-vector loading and corpus ingestion.

mod corpus;
mod embeddings;
mod tokenize;

use thiserror::Error;

pub use corpus::{load_corpus, read_corpus, train_size, CorpusOptions, Document, Genre, LabeledCorpus, Split};
pub use embeddings::{embed_document, load_embeddings, read_embeddings, EmbeddingTable};
pub use tokenize::tokenize;

use crate::embed_topo::EmbedTopoError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("read failed at line {line}: {source}")]
    Read {
        line: usize,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header at line {line}: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("dimension mismatch at line {line}: expected {expected} values, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("invalid number '{value}' at line {line}")]
    InvalidNumber { line: usize, value: String },
    #[error("header declares {declared} vectors but the file has {found}")]
    RowCount { declared: usize, found: usize },
    #[error("none of the document's {tokens} tokens are in the embedding vocabulary")]
    NoKnownTokens { tokens: usize },
    #[error(transparent)]
    Embedding(#[from] EmbedTopoError),
    #[error("CSV error at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("missing required column '{0}'")]
    MissingColumn(String),
    #[error("empty label field for document '{id}' at line {line}")]
    EmptyLabels { line: usize, id: String },
    #[error("duplicate document id '{id}' at line {line}")]
    DuplicateId { line: usize, id: String },
}

impl IngestError {
    /// True for errors caused by malformed input text rather than I/O or content rules.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            IngestError::MalformedHeader { .. }
                | IngestError::DimensionMismatch { .. }
                | IngestError::InvalidNumber { .. }
                | IngestError::RowCount { .. }
                | IngestError::Csv { .. }
        )
    }
}
