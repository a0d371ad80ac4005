use std::cmp::Ordering;
use std::fmt;

use super::distance::DistanceMatrix;
use super::PhError;

/// A vertex, edge or triangle of a Rips complex, tagged with its diameter.
#[derive(Clone, Copy, PartialEq)]
pub struct Simplex {
    vertices: [usize; 3],
    len: u8,
    diameter: f64,
}

impl Simplex {
    pub fn vertex(v: usize) -> Self {
        Simplex { vertices: [v, 0, 0], len: 1, diameter: 0.0 }
    }

    pub fn edge(dist: &DistanceMatrix, a: usize, b: usize) -> Self {
        debug_assert!(a < b);
        Simplex { vertices: [a, b, 0], len: 2, diameter: dist.get(a, b) }
    }

    pub fn triangle(dist: &DistanceMatrix, a: usize, b: usize, c: usize) -> Self {
        debug_assert!(a < b && b < c);
        let diameter = dist.get(a, b).max(dist.get(a, c)).max(dist.get(b, c));
        Simplex { vertices: [a, b, c], len: 3, diameter }
    }

    /// Sorted vertex indices.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices[..self.len as usize]
    }

    /// Simplicial dimension (0 for a vertex).
    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Filtration order: diameter, then dimension, then lexicographic vertices.
    pub fn filtration_cmp(&self, other: &Simplex) -> Ordering {
        self.diameter
            .total_cmp(&other.diameter)
            .then(self.len.cmp(&other.len))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({})", self.vertices(), self.diameter)
    }
}

/// Options shared by filtration construction and persistence.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RipsOptions {
    /// Drop every simplex whose diameter exceeds this scale. `None` builds the full filtration.
    pub max_scale: Option<f64>,
}

impl RipsOptions {
    pub(crate) fn admits(&self, diameter: f64) -> bool {
        self.max_scale.is_none_or(|cap| diameter <= cap)
    }

    pub(crate) fn validate(&self) -> Result<(), PhError> {
        match self.max_scale {
            Some(cap) if cap.is_nan() || cap < 0.0 => Err(PhError::InvalidScale(cap)),
            _ => Ok(()),
        }
    }
}

/// Every Rips simplex of dimension at most `max_dim + 1`, in filtration order.
///
/// Faces always precede their cofaces: a face has diameter no larger and strictly
/// smaller dimension.
pub fn build_filtration(dist: &DistanceMatrix, max_dim: usize) -> Result<Vec<Simplex>, PhError> {
    build_filtration_with(dist, max_dim, &RipsOptions::default())
}

pub fn build_filtration_with(
    dist: &DistanceMatrix,
    max_dim: usize,
    options: &RipsOptions,
) -> Result<Vec<Simplex>, PhError> {
    if max_dim > 1 {
        return Err(PhError::UnsupportedDimension(max_dim));
    }
    options.validate()?;
    let n = dist.len();
    let mut simplices: Vec<Simplex> = (0..n).map(Simplex::vertex).collect();
    for a in 0..n {
        for b in (a + 1)..n {
            let e = Simplex::edge(dist, a, b);
            if options.admits(e.diameter) {
                simplices.push(e);
            }
        }
    }
    if max_dim == 1 {
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    let t = Simplex::triangle(dist, a, b, c);
                    if options.admits(t.diameter) {
                        simplices.push(t);
                    }
                }
            }
        }
    }
    simplices.sort_by(Simplex::filtration_cmp);
    Ok(simplices)
}
