use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use log::warn;

use super::IngestError;
use crate::embed_topo::EmbeddingMatrix;

/// Pre-trained word vectors: an immutable token → vector lookup.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    tokens: Vec<String>,
    values: Vec<f32>,
}

impl EmbeddingTable {
    /// Builds a table from `(token, vector)` pairs; later duplicates are ignored.
    pub fn from_pairs<I, S>(dim: usize, pairs: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: Into<String>,
    {
        let mut table = EmbeddingTable::with_dim(dim);
        for (k, (token, vector)) in pairs.into_iter().enumerate() {
            if vector.len() != dim {
                return Err(IngestError::DimensionMismatch { line: k + 1, expected: dim, found: vector.len() });
            }
            table.insert(token.into(), &vector);
        }
        Ok(table)
    }

    fn with_dim(dim: usize) -> Self {
        EmbeddingTable { dim, index: HashMap::new(), tokens: Vec::new(), values: Vec::new() }
    }

    /// Returns false (and stores nothing) for a token already present.
    fn insert(&mut self, token: String, vector: &[f32]) -> bool {
        if self.index.contains_key(&token) {
            return false;
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.values.extend_from_slice(vector);
        true
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vocabulary size.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.index.get(token).map(|&k| &self.values[k * self.dim..(k + 1) * self.dim])
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Tokens in file order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Reads the word2vec text format: a `V D` header, then `token v1 .. vD` per line.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
    read_embeddings(BufReader::new(file))
}

pub fn read_embeddings(reader: impl BufRead) -> Result<EmbeddingTable, IngestError> {
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));

    let header = loop {
        match lines.next() {
            Some((line, text)) => {
                let text = text.map_err(|source| IngestError::Read { line, source })?;
                if !text.trim().is_empty() {
                    break (line, text);
                }
            }
            None => return Err(IngestError::MalformedHeader { line: 1, reason: "file is empty".into() }),
        }
    };
    let (header_line, header) = header;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parse = |s: &str| s.parse::<usize>().ok();
    let (declared, dim) = match fields.as_slice() {
        [v, d] => match (parse(v), parse(d)) {
            (Some(v), Some(d)) if d > 0 => (v, d),
            _ => {
                return Err(IngestError::MalformedHeader {
                    line: header_line,
                    reason: format!("expected two positive integers 'V D', got '{header}'"),
                })
            }
        },
        _ => {
            return Err(IngestError::MalformedHeader {
                line: header_line,
                reason: format!("expected 'V D', got '{header}'"),
            })
        }
    };

    let mut table = EmbeddingTable::with_dim(dim);
    table.values.reserve(declared.saturating_mul(dim).min(1 << 28));
    let mut vector = Vec::with_capacity(dim);
    let mut rows = 0usize;
    for (line, text) in lines {
        let text = text.map_err(|source| IngestError::Read { line, source })?;
        let mut fields = text.split([' ', '\t']).filter(|f| !f.is_empty());
        let Some(token) = fields.next() else {
            continue;
        };
        vector.clear();
        for field in fields {
            let value: f32 =
                field.parse().map_err(|_| IngestError::InvalidNumber { line, value: field.to_string() })?;
            vector.push(value);
        }
        if vector.len() != dim {
            return Err(IngestError::DimensionMismatch { line, expected: dim, found: vector.len() });
        }
        rows += 1;
        if rows > declared {
            return Err(IngestError::RowCount { declared, found: rows });
        }
        if !table.insert(token.to_string(), &vector) {
            warn!("duplicate token '{token}' at line {line}; keeping the first vector");
        }
    }
    if rows != declared {
        return Err(IngestError::RowCount { declared, found: rows });
    }
    Ok(table)
}

/// Stacks the vectors of in-vocabulary tokens, in order; unknown tokens are skipped.
pub fn embed_document(tokens: &[String], table: &EmbeddingTable) -> Result<EmbeddingMatrix, IngestError> {
    let mut values = Vec::new();
    let mut rows = 0;
    for tok in tokens {
        if let Some(v) = table.get(tok) {
            values.extend(v.iter().map(|&x| f64::from(x)));
            rows += 1;
        }
    }
    if rows == 0 {
        return Err(IngestError::NoKnownTokens { tokens: tokens.len() });
    }
    Ok(EmbeddingMatrix::new(rows, table.dim(), values)?)
}
