//! Topological features from the TF-IDF geometry of a document's blocks.
//!
//! A document is cut into `B` contiguous blocks, each block becomes a TF-IDF
//! vector (document frequencies counted over the blocks of that one
//! document), and the Rips diagram of the cosine-distance graph on the blocks
//! is summarized as `B - 1` component death scales plus five loop statistics.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::ph::{rips_persistence, Bar, DistanceError, DistanceMatrix};

pub const DEFAULT_BLOCKS: usize = 10;

/// Number of loop statistics appended after the component deaths.
pub const LOOP_STATS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TfidfTopoError {
    #[error("document has {tokens} tokens, fewer than the {blocks} blocks requested")]
    TooFewTokens { tokens: usize, blocks: usize },
    #[error("block count must be at least 2, got {0}")]
    TooFewBlocks(usize),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

/// Contiguous, balanced partition of a token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSet<'a> {
    blocks: Vec<&'a [String]>,
}

impl<'a> BlockSet<'a> {
    pub fn blocks(&self) -> &[&'a [String]] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }
}

/// Splits `tokens` into `blocks` contiguous pieces; the first `T mod B` pieces get one extra token.
pub fn split_blocks(tokens: &[String], blocks: usize) -> Result<BlockSet<'_>, TfidfTopoError> {
    if blocks < 2 {
        return Err(TfidfTopoError::TooFewBlocks(blocks));
    }
    if tokens.len() < blocks {
        return Err(TfidfTopoError::TooFewTokens { tokens: tokens.len(), blocks });
    }
    let (q, r) = (tokens.len() / blocks, tokens.len() % blocks);
    let mut out = Vec::with_capacity(blocks);
    let mut start = 0;
    for i in 0..blocks {
        let size = q + usize::from(i < r);
        out.push(&tokens[start..start + size]);
        start += size;
    }
    Ok(BlockSet { blocks: out })
}

/// Sparse TF-IDF weights of one block, keyed by term.
pub type TfidfVector = BTreeMap<String, f64>;

/// Raw counts times smoothed idf, `ln((1 + B) / (1 + df)) + 1`, over the blocks of one document.
/// Terms in `stoplist` get no weight.
pub fn block_tfidf(blocks: &BlockSet<'_>, stoplist: Option<&HashSet<String>>) -> Vec<TfidfVector> {
    let counts: Vec<BTreeMap<&str, usize>> = blocks
        .blocks
        .iter()
        .map(|block| {
            let mut tf = BTreeMap::new();
            for tok in block.iter() {
                if stoplist.is_some_and(|s| s.contains(tok)) {
                    continue;
                }
                *tf.entry(tok.as_str()).or_insert(0usize) += 1;
            }
            tf
        })
        .collect();

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tf in &counts {
        for term in tf.keys() {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let b = blocks.len() as f64;
    counts
        .iter()
        .map(|tf| {
            tf.iter()
                .map(|(&term, &count)| {
                    let idf = ((1.0 + b) / (1.0 + df[term] as f64)).ln() + 1.0;
                    (term.to_string(), count as f64 * idf)
                })
                .collect()
        })
        .collect()
}

/// `1 - cos(a, b)` clamped to `[0, 1]`; 1 when exactly one side is zero, 0 when both are.
pub fn cosine_distance(a: &TfidfVector, b: &TfidfVector) -> f64 {
    let norm_sq = |v: &TfidfVector| v.values().map(|w| w * w).sum::<f64>();
    let (na, nb) = (norm_sq(a), norm_sq(b));
    match (na == 0.0, nb == 0.0) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 1.0,
        _ => {
            let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
            let dot: f64 = small.iter().filter_map(|(t, w)| large.get(t).map(|x| w * x)).sum();
            (1.0 - dot / (na * nb).sqrt()).clamp(0.0, 1.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfidfTopoConfig {
    pub blocks: usize,
    pub stoplist: Option<HashSet<String>>,
}

impl Default for TfidfTopoConfig {
    fn default() -> Self {
        TfidfTopoConfig { blocks: DEFAULT_BLOCKS, stoplist: None }
    }
}

/// Component death scales and loop summary of the block graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfTopoFeatures {
    /// The `B - 1` finite component death scales, ascending.
    pub x: Vec<f64>,
    /// Loop count, mean birth, mean duration, sample std of births, sample std of durations.
    pub y: [f64; LOOP_STATS],
}

impl TfidfTopoFeatures {
    /// `x` followed by `y`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.x.iter().chain(self.y.iter()).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.x.len() + LOOP_STATS
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Cosine-distance graph on the blocks' TF-IDF vectors.
pub fn block_distance_matrix(vectors: &[TfidfVector]) -> Result<DistanceMatrix, TfidfTopoError> {
    Ok(DistanceMatrix::from_fn(vectors.len(), |i, j| cosine_distance(&vectors[i], &vectors[j]))?)
}

pub fn tfidf_topo_features(tokens: &[String], config: &TfidfTopoConfig) -> Result<TfidfTopoFeatures, TfidfTopoError> {
    let blocks = split_blocks(tokens, config.blocks)?;
    let vectors = block_tfidf(&blocks, config.stoplist.as_ref());
    let dist = block_distance_matrix(&vectors)?;
    let pd = rips_persistence(&dist);
    let x = pd.finite_dim0_deaths();
    debug_assert_eq!(x.len(), config.blocks - 1);
    Ok(TfidfTopoFeatures { x, y: loop_statistics(&pd.dim1) })
}

/// The five loop statistics. Everything is 0 without loops; standard deviations use n - 1
/// and are 0 for a single loop.
pub fn loop_statistics(loops: &[Bar]) -> [f64; LOOP_STATS] {
    let births: Vec<f64> = loops.iter().map(|b| b.birth).collect();
    let durations: Vec<f64> = loops.iter().map(Bar::persistence).collect();
    [loops.len() as f64, mean(&births), mean(&durations), sample_std(&births), sample_std(&durations)]
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() <= 1 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}
