use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Symmetric pairwise distances of `m` points, stored as the strict upper
/// triangle in row-major order: `(0,1), (0,2), …, (0,m-1), (1,2), …`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(m: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != pair_count(m) {
            return Err(Error::domain("distance matrix entry count must be m(m-1)/2"));
        }
        if entries.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(Error::domain("distances must be finite and non-negative"));
        }
        Ok(DistanceMatrix { m, entries })
    }

    /// Builds the matrix from a distance function evaluated on all pairs `i < j`.
    pub fn from_fn<F>(m: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<f64>,
    {
        let mut entries = Vec::with_capacity(pair_count(m));
        for i in 0..m {
            for j in i + 1..m {
                entries.push(f(i, j)?);
            }
        }
        DistanceMatrix::new(m, entries)
    }

    /// Number of points.
    pub fn size(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.m);
        i * (2 * self.m - i - 1) / 2 + (j - i - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            core::cmp::Ordering::Equal => 0.0,
            core::cmp::Ordering::Less => self.entries[self.index(i, j)],
            core::cmp::Ordering::Greater => self.entries[self.index(j, i)],
        }
    }

    /// Iterates `(i, j, d)` over `i < j` in storage order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let m = self.m;
        (0..m).flat_map(move |i| (i + 1..m).map(move |j| (i, j))).zip(self.entries.iter()).map(|((i, j), d)| (i, j, *d))
    }

    /// Applies `f` to every entry.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        DistanceMatrix::new(self.m, self.entries.iter().map(|d| f(*d)).collect())
    }

    /// Relabels points so that new point `i` is old point `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.m {
            return Err(Error::domain("permutation length must equal the point count"));
        }
        DistanceMatrix::from_fn(self.m, |i, j| Ok(self.get(perm[i], perm[j])))
    }
}

#[inline]
pub(crate) fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}
