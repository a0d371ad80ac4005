//! Topological features of text documents.
//!
//! Two feature families are provided, both built on Vietoris-Rips persistent
//! homology in dimensions 0 and 1:
//!
//! * [`embed_topo`]: a document's word vectors read as a multivariate time
//!   series; each embedding dimension is scored by the Wasserstein shift of
//!   the dimension graph's diagrams when that dimension is left out (TP1).
//! * [`tfidf_topo`]: the cosine-distance graph of TF-IDF vectors over
//!   contiguous blocks, summarized as component deaths plus loop statistics
//!   (TP2).
//!
//! [`eval`] holds a small one-vs-rest logistic classifier, probability
//! stacking and macro metrics for evaluating the features.

pub mod cli;
pub mod embed_topo;
pub mod eval;
pub mod format;
pub mod ingest;
pub mod ph;
pub mod pipeline;
pub mod tfidf_topo;
pub mod wasserstein;
