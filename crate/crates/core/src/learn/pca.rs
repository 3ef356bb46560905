//! Principal components in the feature geometry.
//!
//! The top eigenpairs of the covariance (or, when vectors are longer than
//! the sample count, of the equivalent Gram matrix) are found by orthogonal
//! iteration with a Rayleigh-Ritz step.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::landscape::{average_vectors, l2_inner, FeatureVector};

use super::{embed, unembed};

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: FeatureVector,
    /// Orthonormal under the feature inner product, by decreasing variance.
    pub components: Vec<FeatureVector>,
    /// Fraction of the total variance carried by each component.
    pub variance_share: Vec<f64>,
}

impl PcaModel {
    /// Coordinates of `v - mean` along each component.
    pub fn project(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        if !v.compatible(&self.mean) {
            return Err(Error::domain("vector layout differs from the fitted model"));
        }
        let centered: Vec<f64> = v.values.iter().zip(&self.mean.values).map(|(a, b)| a - b).collect();
        let centered = self.mean.with_values(centered)?;
        self.components.iter().map(|c| l2_inner(c, &centered)).collect()
    }

    /// `mean + sum_k scores[k] * components[k]`.
    pub fn reconstruct(&self, scores: &[f64]) -> Result<FeatureVector> {
        if scores.len() > self.components.len() {
            return Err(Error::domain("more scores than components"));
        }
        let mut values = self.mean.values.clone();
        for (s, c) in scores.iter().zip(&self.components) {
            for (v, x) in values.iter_mut().zip(&c.values) {
                *v += s * x;
            }
        }
        self.mean.with_values(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaFit {
    pub model: PcaModel,
    pub converged: bool,
    /// Set when the data has fewer nonzero principal directions than requested.
    pub truncated: bool,
}

const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;
const OVERSAMPLE: usize = 4;

pub fn pca_fit(features: &[FeatureVector], components: usize) -> Result<PcaFit> {
    if features.len() < 2 {
        return Err(Error::domain("PCA needs at least two vectors"));
    }
    let mean = average_vectors(features)?;
    let dim = mean.len();
    if components == 0 || components > dim {
        return Err(Error::domain("component count must lie in 1..=vector length"));
    }
    let n = features.len();
    let me = embed(&mean);
    let mut x = DMatrix::<f64>::zeros(n, dim);
    for (i, f) in features.iter().enumerate() {
        for (j, v) in embed(f).into_iter().enumerate() {
            x[(i, j)] = v - me[j];
        }
    }
    let scale = 1.0 / (n - 1) as f64;
    let use_gram = dim > n;
    let a = if use_gram { &x * x.transpose() * scale } else { x.transpose() * &x * scale };
    let total = a.trace();

    let (values, vectors, converged) = top_eigenpairs(&a, components);
    let mut comps: Vec<Vec<f64>> = Vec::new();
    let mut shares = Vec::new();
    for (k, &lambda) in values.iter().enumerate() {
        if !(total > 0.0) || lambda <= 1e-12 * total {
            break;
        }
        let v = vectors.column(k);
        let mut e: Vec<f64> = if use_gram {
            let u = x.transpose() * v;
            u.iter().copied().collect()
        } else {
            v.iter().copied().collect()
        };
        // re-orthonormalize against earlier components
        for prev in &comps {
            let d: f64 = prev.iter().zip(&e).map(|(a, b)| a * b).sum();
            e.iter_mut().zip(prev).for_each(|(a, b)| *a -= d * b);
        }
        let norm = libm::sqrt(e.iter().map(|a| a * a).sum::<f64>());
        if !(norm > 0.0) {
            break;
        }
        e.iter_mut().for_each(|a| *a /= norm);
        comps.push(e);
        shares.push((lambda / total).clamp(0.0, 1.0));
    }
    let truncated = comps.len() < components;
    let components = comps.iter().map(|e| unembed(&mean, e)).collect();
    Ok(PcaFit { model: PcaModel { mean, components, variance_share: shares }, converged, truncated })
}

/// Largest `p` eigenpairs of a symmetric positive semidefinite matrix,
/// eigenvalues decreasing.
fn top_eigenpairs(a: &DMatrix<f64>, p: usize) -> (Vec<f64>, DMatrix<f64>, bool) {
    let s = a.nrows();
    let p = p.min(s);
    let q = (p + OVERSAMPLE).min(s);
    // deterministic, generic starting block
    let mut basis = DMatrix::from_fn(s, q, |i, j| libm::sin(1.0 + (i * q + j) as f64 * 0.754_877_666));
    basis = basis.qr().q();
    let norm = a.norm().max(f64::MIN_POSITIVE);
    let mut values = Vec::new();
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let z = a * &basis;
        basis = z.qr().q();
        let h = basis.transpose() * a * &basis;
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let w = DMatrix::from_fn(q, q, |i, j| eig.eigenvectors[(i, order[j])]);
        basis = &basis * w;
        values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let residual = (0..p).map(|k| (a * basis.column(k) - basis.column(k) * values[k]).norm()).fold(0.0, f64::max);
        if residual <= TOLERANCE * norm {
            converged = true;
            break;
        }
    }
    values.truncate(p);
    (values, basis.columns(0, p).into_owned(), converged)
}

/// Scores on the first component mapped affinely from `[min, max]` onto `[-2, 2]`.
///
/// The orientation of a principal axis is arbitrary, so the result is
/// determined only up to sign.
pub fn pca_curvature_estimate(model: &PcaModel, features: &[FeatureVector]) -> Result<Vec<f64>> {
    let first = model.components.first().ok_or_else(|| Error::domain("model has no components"))?;
    let mut scores = Vec::with_capacity(features.len());
    for f in features {
        if !f.compatible(first) {
            return Err(Error::domain("vector layout differs from the fitted model"));
        }
        let c: Vec<f64> = f.values.iter().zip(&model.mean.values).map(|(a, b)| a - b).collect();
        scores.push(l2_inner(first, &f.with_values(c)?)?);
    }
    rescale_scores(&scores)
}

pub(crate) fn rescale_scores(scores: &[f64]) -> Result<Vec<f64>> {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::domain("degenerate score range"));
    }
    Ok(scores.iter().map(|s| -2.0 + 4.0 * (s - lo) / (hi - lo)).collect())
}
