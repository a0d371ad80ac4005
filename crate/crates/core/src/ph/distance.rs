use std::fmt;

use thiserror::Error;

/// Ways a candidate distance matrix can fail validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistanceError {
    #[error("distance matrix is empty")]
    Empty,
    #[error("expected {expected} entries for a {n}x{n} matrix, got {actual}", expected = n * n)]
    Shape { n: usize, actual: usize },
    #[error("entry ({i}, {j}) is not finite: {value}")]
    NonFinite { i: usize, j: usize, value: f64 },
    #[error("entry ({i}, {j}) is negative: {value}")]
    Negative { i: usize, j: usize, value: f64 },
    #[error("matrix is not symmetric at ({i}, {j}): {a} != {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("diagonal entry ({i}, {i}) is nonzero: {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
}

/// A validated symmetric, nonnegative matrix with zero diagonal, stored row-major.
#[derive(Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from `n * n` row-major entries, checking every invariant.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self, DistanceError> {
        if n == 0 {
            return Err(DistanceError::Empty);
        }
        if entries.len() != n * n {
            return Err(DistanceError::Shape { n, actual: entries.len() });
        }
        for i in 0..n {
            for j in 0..n {
                let value = entries[i * n + j];
                if !value.is_finite() {
                    return Err(DistanceError::NonFinite { i, j, value });
                }
                if value < 0.0 {
                    return Err(DistanceError::Negative { i, j, value });
                }
            }
        }
        for i in 0..n {
            let value = entries[i * n + i];
            if value != 0.0 {
                return Err(DistanceError::NonzeroDiagonal { i, value });
            }
            for j in (i + 1)..n {
                let a = entries[i * n + j];
                let b = entries[j * n + i];
                if a != b {
                    return Err(DistanceError::Asymmetric { i, j, a, b });
                }
            }
        }
        Ok(DistanceMatrix { n, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, DistanceError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(DistanceError::Shape { n, actual: n * (n - 1) + row.len() });
            }
            entries.extend_from_slice(row);
        }
        Self::new(n, entries)
    }

    /// Builds a matrix from a pairwise function evaluated on the strict upper triangle.
    /// The result is symmetric by construction; the function must return nonnegative finite values.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, DistanceError> {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let value = f(i, j);
                entries[i * n + j] = value;
                entries[j * n + i] = value;
            }
        }
        Self::new(n, entries)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Largest entry; 0 for a single point.
    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// The matrix with row and column `d` deleted, or `None` if that would leave it empty.
    pub fn without(&self, d: usize) -> Option<DistanceMatrix> {
        assert!(d < self.n, "index {d} out of range for {}x{} matrix", self.n, self.n);
        if self.n == 1 {
            return None;
        }
        let m = self.n - 1;
        let mut entries = Vec::with_capacity(m * m);
        for i in (0..self.n).filter(|&i| i != d) {
            let row = self.row(i);
            entries.extend(row.iter().enumerate().filter(|&(j, _)| j != d).map(|(_, &v)| v));
        }
        Some(DistanceMatrix { n: m, entries })
    }

    /// Relabels vertices so that new vertex `k` is old vertex `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> DistanceMatrix {
        assert_eq!(perm.len(), self.n);
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        DistanceMatrix { n, entries }
    }

    /// Multiplies every entry by `factor`, which must be positive and finite.
    pub fn scaled(&self, factor: f64) -> DistanceMatrix {
        assert!(factor > 0.0 && factor.is_finite());
        DistanceMatrix { n: self.n, entries: self.entries.iter().map(|v| v * factor).collect() }
    }
}

impl fmt::Debug for DistanceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistanceMatrix").field("n", &self.n).finish_non_exhaustive()
    }
}
