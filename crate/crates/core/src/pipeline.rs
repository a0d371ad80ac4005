//! Per-document feature extraction shared by the CLI and the C interface.

use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::embed_topo::{embedding_topo_features, EmbedTopoConfig, EmbedTopoError};
use crate::eval::{EvalError, FeatureMatrix};
use crate::ingest::{embed_document, EmbeddingTable, IngestError, LabeledCorpus};
use crate::tfidf_topo::{tfidf_topo_features, TfidfTopoConfig, TfidfTopoError, LOOP_STATS};

/// Which feature families to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractMode {
    Tp1,
    Tp2,
    Both,
}

impl ExtractMode {
    pub fn needs_embeddings(self) -> bool {
        matches!(self, ExtractMode::Tp1 | ExtractMode::Both)
    }

    fn tp1(self) -> bool {
        self.needs_embeddings()
    }

    fn tp2(self) -> bool {
        matches!(self, ExtractMode::Tp2 | ExtractMode::Both)
    }
}

impl FromStr for ExtractMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tp1" => Ok(ExtractMode::Tp1),
            "tp2" => Ok(ExtractMode::Tp2),
            "both" => Ok(ExtractMode::Both),
            other => Err(format!("unknown mode '{other}' (expected tp1, tp2 or both)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("embeddings are required for TP1 features")]
    MissingEmbeddings,
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    EmbedTopo(#[from] EmbedTopoError),
    #[error(transparent)]
    TfidfTopo(#[from] TfidfTopoError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Default)]
pub struct ExtractConfig {
    pub embed: EmbedTopoConfig,
    pub tfidf: TfidfTopoConfig,
}

/// Column names, in output order, for a mode and embedding dimensionality.
pub fn feature_names(mode: ExtractMode, dim: usize, blocks: usize) -> Vec<String> {
    let mut names = Vec::new();
    if mode.tp1() {
        names.extend((1..=dim).map(|d| format!("tp1_omega0_{d}")));
        names.extend((1..=dim).map(|d| format!("tp1_omega1_{d}")));
    }
    if mode.tp2() {
        names.extend((1..blocks).map(|k| format!("tp2_x{k}")));
        names.extend((1..=LOOP_STATS).map(|k| format!("tp2_y{k}")));
    }
    names
}

/// Feature vector of one tokenized document.
pub fn document_features(
    tokens: &[String],
    mode: ExtractMode,
    table: Option<&EmbeddingTable>,
    config: &ExtractConfig,
) -> Result<Vec<f64>, ExtractError> {
    let mut out = Vec::new();
    if mode.tp1() {
        let table = table.ok_or(ExtractError::MissingEmbeddings)?;
        let psi = embed_document(tokens, table)?;
        out.extend(embedding_topo_features(&psi, &config.embed)?.to_vec());
    }
    if mode.tp2() {
        out.extend(tfidf_topo_features(tokens, &config.tfidf)?.to_vec());
    }
    Ok(out)
}

/// Result of extracting a whole corpus: successful rows plus per-document failures.
#[derive(Debug)]
pub struct Extraction {
    pub features: FeatureMatrix,
    pub failures: Vec<(String, ExtractError)>,
}

/// Extracts every document in parallel; rows keep corpus order regardless of completion order.
pub fn extract_corpus(
    corpus: &LabeledCorpus,
    mode: ExtractMode,
    table: Option<&EmbeddingTable>,
    config: &ExtractConfig,
) -> Result<Extraction, ExtractError> {
    if mode.needs_embeddings() && table.is_none() {
        return Err(ExtractError::MissingEmbeddings);
    }
    let dim = table.map_or(0, EmbeddingTable::dim);
    let results: Vec<Result<Vec<f64>, ExtractError>> =
        corpus.documents.par_iter().map(|doc| document_features(&doc.tokens, mode, table, config)).collect();

    let mut ids = Vec::new();
    let mut values = Vec::new();
    let mut failures = Vec::new();
    for (doc, result) in corpus.documents.iter().zip(results) {
        match result {
            Ok(v) => {
                ids.push(doc.id.clone());
                values.extend(v);
            }
            Err(e) => failures.push((doc.id.clone(), e)),
        }
    }
    let features = FeatureMatrix::new(ids, feature_names(mode, dim, config.tfidf.blocks), values)?;
    Ok(Extraction { features, failures })
}
