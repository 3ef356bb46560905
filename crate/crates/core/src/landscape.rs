//! Death vectors and discretised persistence landscapes as feature vectors.
//!
//! The landscape of a bar code is `lambda(k, t) = k-th largest of
//! max(0, min(t - b, d - t))` over its intervals `(b, d)`, sampled on a
//! regular grid. Feature vectors carry an inner product in which landscape
//! coordinates are weighted by the grid step (a Riemann sum for the `L^2`
//! inner product) and death-vector coordinates are not weighted.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::persistence::{DeathVector, PersistenceDiagram};

/// Sample points `start + i * step` for `i < points`, and `levels` landscape levels.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LandscapeGrid {
    pub start: f64,
    pub step: f64,
    pub points: usize,
    pub levels: usize,
}

impl LandscapeGrid {
    pub fn new(start: f64, step: f64, points: usize, levels: usize) -> Result<Self> {
        if !start.is_finite() || !(step > 0.0) || !step.is_finite() {
            return Err(Error::domain("grid start must be finite and step positive"));
        }
        if points < 2 || levels < 1 {
            return Err(Error::domain("grid needs at least two points and one level"));
        }
        Ok(LandscapeGrid { start, step, points, levels })
    }

    /// `[0, 2]` in 400 steps, 30 levels: every distance in the unit disk is at most 2.
    pub fn distance_default() -> Self {
        LandscapeGrid { start: 0.0, step: 2.0 / 400.0, points: 401, levels: 30 }
    }

    /// `[0, 1]` in 400 steps, 30 levels, for ranks divided by their count.
    pub fn ordinal_default() -> Self {
        LandscapeGrid { start: 0.0, step: 1.0 / 400.0, points: 401, levels: 30 }
    }

    #[inline]
    pub fn t(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn len(&self) -> usize {
        self.points * self.levels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Landscape values, level-major: `values[level * points + i]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LandscapeVector {
    pub grid: LandscapeGrid,
    pub values: Vec<f64>,
}

impl LandscapeVector {
    pub fn level(&self, k: usize) -> &[f64] {
        &self.values[k * self.grid.points..(k + 1) * self.grid.points]
    }
}

pub fn landscape_from_diagram(diag: &PersistenceDiagram, grid: &LandscapeGrid) -> LandscapeVector {
    let mut values = alloc::vec![0.0; grid.len()];
    let mut tents: Vec<f64> = Vec::with_capacity(diag.len());
    for i in 0..grid.points {
        let t = grid.t(i);
        tents.clear();
        tents.extend(diag.pairs.iter().map(|p| (t - p.birth).min(p.death - t)).filter(|h| *h > 0.0));
        tents.sort_unstable_by(|a, b| b.total_cmp(a));
        for (k, h) in tents.iter().take(grid.levels).enumerate() {
            values[k * grid.points + i] = *h;
        }
    }
    LandscapeVector { grid: *grid, values }
}

/// Which bar codes a feature vector encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FeatureKind {
    H0,
    H1,
    H0H1,
}

impl FeatureKind {
    pub fn uses_h0(self) -> bool {
        matches!(self, FeatureKind::H0 | FeatureKind::H0H1)
    }

    pub fn uses_h1(self) -> bool {
        matches!(self, FeatureKind::H1 | FeatureKind::H0H1)
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::H0 => "H0",
            FeatureKind::H1 => "H1",
            FeatureKind::H0H1 => "H0H1",
        }
    }
}

impl core::str::FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H0" | "h0" => Ok(FeatureKind::H0),
            "H1" | "h1" => Ok(FeatureKind::H1),
            "H0H1" | "h0h1" => Ok(FeatureKind::H0H1),
            _ => Err(Error::domain("feature kind must be H0, H1 or H0H1")),
        }
    }
}

/// A death vector, a landscape, or their concatenation (death vector first).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct FeatureVector {
    pub kind: FeatureKind,
    /// Length of the leading death-vector block (zero for `H1`).
    pub h0_len: usize,
    /// Grid of the trailing landscape block (absent for `H0`).
    pub grid: Option<LandscapeGrid>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn from_death_vector(dv: &DeathVector) -> Self {
        FeatureVector { kind: FeatureKind::H0, h0_len: dv.len(), grid: None, values: dv.as_slice().to_vec() }
    }

    pub fn from_landscape(l: &LandscapeVector) -> Self {
        FeatureVector { kind: FeatureKind::H1, h0_len: 0, grid: Some(l.grid), values: l.values.clone() }
    }

    /// Concatenates an `H0` vector and an `H1` vector.
    pub fn concat(h0: &FeatureVector, h1: &FeatureVector) -> Result<Self> {
        if h0.kind != FeatureKind::H0 || h1.kind != FeatureKind::H1 {
            return Err(Error::domain("concatenation needs an H0 vector followed by an H1 vector"));
        }
        let mut values = h0.values.clone();
        values.extend_from_slice(&h1.values);
        Ok(FeatureVector { kind: FeatureKind::H0H1, h0_len: h0.h0_len, grid: h1.grid, values })
    }

    /// Splits into the `H0` and `H1` blocks, whichever are present.
    pub fn split(&self) -> (Option<FeatureVector>, Option<FeatureVector>) {
        let h0 = self.kind.uses_h0().then(|| FeatureVector {
            kind: FeatureKind::H0,
            h0_len: self.h0_len,
            grid: None,
            values: self.values[..self.h0_len].to_vec(),
        });
        let h1 = self.kind.uses_h1().then(|| FeatureVector {
            kind: FeatureKind::H1,
            h0_len: 0,
            grid: self.grid,
            values: self.values[self.h0_len..].to_vec(),
        });
        (h0, h1)
    }

    /// Restricts an `H0H1` vector to one of its blocks (or returns a copy).
    pub fn select(&self, kind: FeatureKind) -> Result<FeatureVector> {
        if kind == self.kind {
            return Ok(self.clone());
        }
        let (h0, h1) = self.split();
        match (kind, h0, h1) {
            (FeatureKind::H0, Some(v), _) | (FeatureKind::H1, _, Some(v)) => Ok(v),
            _ => Err(Error::domain("feature vector does not contain the requested block")),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Per-coordinate weights of the feature inner product.
    pub fn coordinate_weights(&self) -> Vec<f64> {
        let step = self.grid.map_or(1.0, |g| g.step);
        (0..self.values.len()).map(|i| if i < self.h0_len { 1.0 } else { step }).collect()
    }

    /// True when both vectors live in the same feature space.
    pub fn compatible(&self, other: &FeatureVector) -> bool {
        self.kind == other.kind && self.h0_len == other.h0_len && self.grid == other.grid && self.len() == other.len()
    }

    /// Same layout with new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<FeatureVector> {
        if values.len() != self.values.len() {
            return Err(Error::domain("replacement values have the wrong length"));
        }
        Ok(FeatureVector { values, ..self.clone() })
    }
}

/// Pointwise mean of compatible feature vectors.
pub fn average_vectors(vs: &[FeatureVector]) -> Result<FeatureVector> {
    let first = vs.first().ok_or_else(|| Error::domain("cannot average an empty list"))?;
    if vs.iter().any(|v| !v.compatible(first)) {
        return Err(Error::domain("averaged vectors must share kind, length and grid"));
    }
    let mut values = alloc::vec![0.0; first.len()];
    for v in vs {
        for (acc, x) in values.iter_mut().zip(&v.values) {
            *acc += x;
        }
    }
    let n = vs.len() as f64;
    values.iter_mut().for_each(|x| *x /= n);
    first.with_values(values)
}

/// Inner product with landscape coordinates weighted by the grid step.
pub fn l2_inner(v: &FeatureVector, w: &FeatureVector) -> Result<f64> {
    if !v.compatible(w) {
        return Err(Error::domain("inner product of incompatible feature vectors"));
    }
    let split = v.h0_len;
    let step = v.grid.map_or(1.0, |g| g.step);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    Ok(dot(&v.values[..split], &w.values[..split]) + step * dot(&v.values[split..], &w.values[split..]))
}
