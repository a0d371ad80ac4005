//! Wasserstein distance between persistence diagrams.
//!
//! Points are matched either to each other or to the diagonal, with the L∞
//! ground metric. A point's cheapest diagonal partner is the midpoint
//! projection, at cost `(death - birth) / 2`.

pub mod assignment;

use thiserror::Error;

use crate::ph::{Bar, PersistenceDiagram};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WassersteinError {
    #[error("Wasserstein exponent must be a finite number >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("diagram point ({birth}, {death}) has a non-finite coordinate; cap infinite bars first")]
    NonFinitePoint { birth: f64, death: f64 },
    #[error("cap {cap} is below the finite death {death}")]
    CapTooSmall { cap: f64, death: f64 },
}

/// L∞ distance between two diagram points.
pub fn linf(a: &Bar, b: &Bar) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

/// L∞ distance from a point to the diagonal.
pub fn diagonal_cost(a: &Bar) -> f64 {
    (a.death - a.birth).abs() / 2.0
}

/// p-Wasserstein distance between two single-dimension diagrams, solved exactly.
pub fn wasserstein(a: &[Bar], b: &[Bar], p: f64) -> Result<f64, WassersteinError> {
    if !(1.0..f64::INFINITY).contains(&p) {
        return Err(WassersteinError::InvalidExponent(p));
    }
    for bar in a.iter().chain(b) {
        if !bar.birth.is_finite() || !bar.death.is_finite() {
            return Err(WassersteinError::NonFinitePoint { birth: bar.birth, death: bar.death });
        }
    }
    let (m, k) = (a.len(), b.len());
    let n = m + k;
    if n == 0 {
        return Ok(0.0);
    }

    // Rows: a's points, then one diagonal slot per point of b.
    // Columns: b's points, then one diagonal slot per point of a.
    // Diagonal slots are interchangeable, so a point pays its own projection
    // cost against any of them and slot-to-slot matches are free.
    let pow = |x: f64| if p == 1.0 { x } else { x.powf(p) };
    let mut cost = vec![0.0; n * n];
    for (i, x) in a.iter().enumerate() {
        let row = &mut cost[i * n..(i + 1) * n];
        for (j, y) in b.iter().enumerate() {
            row[j] = pow(linf(x, y));
        }
        row[k..].fill(pow(diagonal_cost(x)));
    }
    for i in m..n {
        let row = &mut cost[i * n..(i + 1) * n];
        for (j, y) in b.iter().enumerate() {
            row[j] = pow(diagonal_cost(y));
        }
    }

    let (total, _) = assignment::solve(n, &cost);
    let total = total.max(0.0);
    Ok(if p == 1.0 { total } else { total.powf(1.0 / p) })
}

/// Replaces every infinite death with `cap`.
pub fn normalize_infinite(d: &PersistenceDiagram, cap: f64) -> Result<PersistenceDiagram, WassersteinError> {
    let fix = |bars: &[Bar]| -> Result<Vec<Bar>, WassersteinError> {
        bars.iter()
            .map(|b| {
                if b.death.is_infinite() {
                    Ok(Bar::new(b.birth, cap))
                } else if b.death > cap {
                    Err(WassersteinError::CapTooSmall { cap, death: b.death })
                } else {
                    Ok(*b)
                }
            })
            .collect()
    };
    if cap.is_nan() {
        return Err(WassersteinError::CapTooSmall { cap, death: f64::NAN });
    }
    Ok(PersistenceDiagram::new(fix(&d.dim0)?, fix(&d.dim1)?))
}
