//! Vietoris-Rips persistent homology in dimensions 0 and 1.

mod diagram;
mod distance;
mod filtration;
mod persistence;

use thiserror::Error;

pub use diagram::{Bar, PersistenceDiagram};
pub use distance::{DistanceError, DistanceMatrix};
pub use filtration::{build_filtration, build_filtration_with, RipsOptions, Simplex};
pub use persistence::{rips_persistence, rips_persistence_with};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhError {
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error("homology is only computed in dimensions 0 and 1, got max_dim = {0}")]
    UnsupportedDimension(usize),
    #[error("scale must be a nonnegative number, got {0}")]
    InvalidScale(f64),
}

/// Betti numbers (beta0, beta1) of the Rips complex at `scale`.
pub fn betti_at_scale(dist: &DistanceMatrix, scale: f64) -> Result<(usize, usize), PhError> {
    if scale.is_nan() || scale < 0.0 {
        return Err(PhError::InvalidScale(scale));
    }
    let pd = rips_persistence(dist);
    Ok(betti_from_diagram(&pd, scale))
}

pub fn betti_from_diagram(pd: &PersistenceDiagram, scale: f64) -> (usize, usize) {
    let count = |bars: &[Bar]| bars.iter().filter(|b| b.alive_at(scale)).count();
    (count(&pd.dim0), count(&pd.dim1))
}
