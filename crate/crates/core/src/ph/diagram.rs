/// One homology class: the scale at which it appears and the scale at which it dies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(birth: f64, death: f64) -> Self {
        Bar { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    /// Alive at `scale` under the half-open convention `birth <= scale < death`.
    pub fn alive_at(&self, scale: f64) -> bool {
        self.birth <= scale && scale < self.death
    }
}

/// Persistence diagram in homological dimensions 0 and 1.
///
/// Bars are kept in a canonical order (birth, then death) so that equal
/// diagrams compare equal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PersistenceDiagram {
    pub dim0: Vec<Bar>,
    pub dim1: Vec<Bar>,
}

impl PersistenceDiagram {
    pub fn new(mut dim0: Vec<Bar>, mut dim1: Vec<Bar>) -> Self {
        sort_bars(&mut dim0);
        sort_bars(&mut dim1);
        PersistenceDiagram { dim0, dim1 }
    }

    pub fn dim(&self, k: usize) -> &[Bar] {
        match k {
            0 => &self.dim0,
            1 => &self.dim1,
            _ => &[],
        }
    }

    /// Finite death scales in dimension 0, ascending.
    pub fn finite_dim0_deaths(&self) -> Vec<f64> {
        let mut deaths: Vec<f64> = self.dim0.iter().filter(|b| !b.is_infinite()).map(|b| b.death).collect();
        deaths.sort_by(f64::total_cmp);
        deaths
    }
}

pub(crate) fn sort_bars(bars: &mut [Bar]) {
    bars.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
}
