//! Topological features of a document read as a multivariate time series of
//! word embeddings.
//!
//! Each embedding dimension is one series over token positions. Series are
//! smoothed with a fixed 7-tap kernel, compared pairwise to form a graph on
//! the dimensions, and each dimension is scored by how far the graph's
//! persistence diagrams move when that dimension's vertex is removed.

use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::ph::{rips_persistence, DistanceError, DistanceMatrix, PersistenceDiagram};
use crate::wasserstein::{normalize_infinite, wasserstein, WassersteinError};

/// Kernel weights for offsets -3..=3.
pub const SMOOTHING_KERNEL: [f64; 7] = [0.125, 0.25, 0.5, 1.0, 0.5, 0.25, 0.125];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbedTopoError {
    #[error("embedding matrix needs at least one row, got 0")]
    NoTokens,
    #[error("embedding matrix needs at least {min} columns, got {got}")]
    TooFewDimensions { min: usize, got: usize },
    #[error("expected {expected} values for a {rows}x{cols} matrix, got {actual}", expected = rows * cols)]
    Shape { rows: usize, cols: usize, actual: usize },
    #[error("embedding value at row {row}, column {col} is not finite")]
    NonFinite { row: usize, col: usize },
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Wasserstein(#[from] WassersteinError),
}

/// T x D matrix: one row per token, one column per embedding dimension, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self, EmbedTopoError> {
        if rows == 0 {
            return Err(EmbedTopoError::NoTokens);
        }
        if cols < 2 {
            return Err(EmbedTopoError::TooFewDimensions { min: 2, got: cols });
        }
        if values.len() != rows * cols {
            return Err(EmbedTopoError::Shape { rows, cols, actual: values.len() });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(EmbedTopoError::NonFinite { row: k / cols, col: k % cols });
        }
        Ok(EmbeddingMatrix { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, EmbedTopoError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(EmbedTopoError::Shape { rows: rows.len(), cols, actual: values.len() + r.len() });
            }
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, values)
    }

    /// Number of tokens, T.
    pub fn tokens(&self) -> usize {
        self.rows
    }

    /// Embedding dimensionality, D.
    pub fn dims(&self) -> usize {
        self.cols
    }

    pub fn get(&self, t: usize, d: usize) -> f64 {
        self.values[t * self.cols + d]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, d: usize) -> Vec<f64> {
        (0..self.rows).map(|t| self.get(t, d)).collect()
    }

    /// Copy with embedding dimension `d` removed. Requires at least three columns.
    pub fn without_column(&self, d: usize) -> Result<EmbeddingMatrix, EmbedTopoError> {
        let keep: Vec<usize> = (0..self.cols).filter(|&c| c != d).collect();
        let values = (0..self.rows).flat_map(|t| keep.iter().map(move |&c| self.get(t, c))).collect();
        EmbeddingMatrix::new(self.rows, keep.len(), values)
    }

    /// Copy whose column `k` is this matrix's column `perm[k]`.
    pub fn permute_columns(&self, perm: &[usize]) -> EmbeddingMatrix {
        assert_eq!(perm.len(), self.cols);
        let values = (0..self.rows).flat_map(|t| perm.iter().map(move |&c| self.get(t, c))).collect();
        EmbeddingMatrix { rows: self.rows, cols: self.cols, values }
    }
}

/// How the smoothing kernel treats positions within three tokens of either end.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SmoothingMode {
    /// Drop out-of-range terms and keep the remaining weights as they are.
    #[default]
    Truncate,
    /// Drop out-of-range terms, then rescale so the weights used sum to the full kernel's 2.75.
    Renormalize,
}

impl FromStr for SmoothingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "truncate" => Ok(SmoothingMode::Truncate),
            "renormalize" => Ok(SmoothingMode::Renormalize),
            other => Err(format!("unknown smoothing mode '{other}' (expected truncate or renormalize)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedTopoConfig {
    pub smoothing: SmoothingMode,
    /// Wasserstein exponent.
    pub p: f64,
}

impl Default for EmbedTopoConfig {
    fn default() -> Self {
        EmbedTopoConfig { smoothing: SmoothingMode::Truncate, p: 1.0 }
    }
}

/// Applies the 7-tap kernel down every column.
pub fn smooth_columns(psi: &EmbeddingMatrix, mode: SmoothingMode) -> EmbeddingMatrix {
    let (rows, cols) = (psi.rows, psi.cols);
    let full: f64 = SMOOTHING_KERNEL.iter().sum();
    let mut out = vec![0.0; rows * cols];
    for t in 0..rows {
        let lo = t.saturating_sub(3);
        let hi = (t + 3).min(rows - 1);
        let weight_sum: f64 = (lo..=hi).map(|s| SMOOTHING_KERNEL[s + 3 - t]).sum();
        let scale = match mode {
            SmoothingMode::Truncate => 1.0,
            SmoothingMode::Renormalize => full / weight_sum,
        };
        let dst = &mut out[t * cols..(t + 1) * cols];
        for s in lo..=hi {
            let w = SMOOTHING_KERNEL[s + 3 - t] * scale;
            let src = &psi.values[s * cols..(s + 1) * cols];
            for (o, &v) in dst.iter_mut().zip(src) {
                *o += w * v;
            }
        }
    }
    EmbeddingMatrix { rows, cols, values: out }
}

/// Pairwise distance between columns:
/// `(1/T) * |x_i| * |x_j| * (1 - cos(x_i, x_j))`, with 0 when either column is zero.
pub fn column_distance_matrix(smoothed: &EmbeddingMatrix) -> Result<DistanceMatrix, EmbedTopoError> {
    let (rows, cols) = (smoothed.rows, smoothed.cols);
    let columns: Vec<Vec<f64>> = (0..cols).map(|d| smoothed.column(d)).collect();
    let sq_norms: Vec<f64> = columns.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>()).collect();
    let inv_t = 1.0 / rows as f64;
    // |x||y|(1 - cos) = |x||y| - x.y; the product of squared norms keeps identical columns at exactly 0.
    let dist = DistanceMatrix::from_fn(cols, |i, j| {
        if sq_norms[i] == 0.0 || sq_norms[j] == 0.0 {
            return 0.0;
        }
        let dot: f64 = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
        (inv_t * ((sq_norms[i] * sq_norms[j]).sqrt() - dot)).max(0.0)
    })?;
    Ok(dist)
}

/// The two halves of the 2 x D feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTopoFeatures {
    /// Dimension 0 sensitivity per embedding dimension.
    pub omega0: Vec<f64>,
    /// Dimension 1 sensitivity per embedding dimension.
    pub omega1: Vec<f64>,
}

impl EmbeddingTopoFeatures {
    /// `omega0` followed by `omega1`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.omega0.iter().chain(&self.omega1).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.omega0.len() + self.omega1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Distance between the dimension graph's diagrams with and without vertex `d`, for every `d`.
pub fn embedding_topo_features(
    psi: &EmbeddingMatrix,
    config: &EmbedTopoConfig,
) -> Result<EmbeddingTopoFeatures, EmbedTopoError> {
    if psi.cols < 3 {
        return Err(EmbedTopoError::TooFewDimensions { min: 3, got: psi.cols });
    }
    if !(1.0..f64::INFINITY).contains(&config.p) {
        return Err(WassersteinError::InvalidExponent(config.p).into());
    }
    let theta = column_distance_matrix(&smooth_columns(psi, config.smoothing))?;
    sensitivity(&theta, config.p)
}

/// Leave-one-out sensitivity of a distance matrix's diagrams.
///
/// Infinite bars on both sides are capped at the larger of the two matrices'
/// maximum entries, which is always the full matrix's.
pub fn sensitivity(theta: &DistanceMatrix, p: f64) -> Result<EmbeddingTopoFeatures, EmbedTopoError> {
    let cap = theta.max_entry();
    let full = normalize_infinite(&rips_persistence(theta), cap)?;
    let scores: Vec<(f64, f64)> = (0..theta.len())
        .into_par_iter()
        .map(|d| -> Result<(f64, f64), EmbedTopoError> {
            let reduced = theta.without(d).expect("at least two vertices remain");
            let cap = cap.max(reduced.max_entry());
            let pd: PersistenceDiagram = normalize_infinite(&rips_persistence(&reduced), cap)?;
            Ok((wasserstein(&full.dim0, &pd.dim0, p)?, wasserstein(&full.dim1, &pd.dim1, p)?))
        })
        .collect::<Result<_, _>>()?;
    let (omega0, omega1) = scores.into_iter().unzip();
    Ok(EmbeddingTopoFeatures { omega0, omega1 })
}
