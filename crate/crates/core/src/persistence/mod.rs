//! Vietoris–Rips persistent homology in degrees 0 and 1 over the two-element
//! field.
//!
//! Degree 0 is read off Kruskal's algorithm. Degree 1 runs a column reduction
//! of the edge coboundary matrix with clearing (edges that kill a component
//! are never reduced) and the emergent-pair shortcut; the resulting pairs are
//! those of homology. [`brute_force_diagram`] reduces the explicit boundary
//! matrix and serves as an oracle on small inputs.

mod brute;
mod distance_matrix;
mod rips;
mod union_find;

pub use brute::{brute_force_diagram, BRUTE_FORCE_MAX_POINTS};
pub use distance_matrix::DistanceMatrix;
pub use rips::{h0_death_vector, h1_diagram, h1_diagram_with, RipsOptions};
pub use union_find::UnionFind;

use alloc::vec::Vec;

/// One interval `[birth, death)` of a bar code.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Finite intervals of positive length in one homological degree.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PersistenceDiagram {
    pub dim: usize,
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn new(dim: usize, mut pairs: Vec<PersistencePair>) -> Self {
        pairs.retain(|p| p.death > p.birth);
        pairs.sort_by(|x, y| x.birth.total_cmp(&y.birth).then(x.death.total_cmp(&y.death)));
        PersistenceDiagram { dim, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Multiplies every birth and death by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let pairs =
            self.pairs.iter().map(|p| PersistencePair { birth: p.birth * factor, death: p.death * factor }).collect();
        PersistenceDiagram { dim: self.dim, pairs }
    }
}

/// Degree-0 deaths sorted in decreasing order.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct DeathVector(Vec<f64>);

impl DeathVector {
    /// Sorts the given deaths into decreasing order.
    pub fn from_deaths(mut deaths: Vec<f64>) -> Self {
        deaths.sort_by(|a, b| b.total_cmp(a));
        DeathVector(deaths)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
