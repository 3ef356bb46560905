//! Regressors on feature vectors: weighted nearest neighbours, linear
//! support vector and quantile regression, and principal components.
//!
//! All learners use the feature inner product of [`l2_inner`](crate::landscape::l2_inner).
//! Internally vectors are embedded isometrically into plain Euclidean space
//! by scaling each coordinate with the square root of its weight.

mod knn;
mod metrics;
mod pca;
mod svr;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::landscape::{l2_inner, FeatureVector};

pub use knn::knn_estimate;
pub use metrics::{rmse, spearman};
pub use pca::{pca_curvature_estimate, pca_fit, PcaFit, PcaModel};
pub use svr::{quantile_train, svr_train, svr_train_with, Loss, SolverOptions, SvrFit, SvrModel};

/// Feature vectors of one layout paired with curvature labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    features: Vec<FeatureVector>,
    labels: Vec<f64>,
}

impl TrainingSet {
    pub fn new(features: Vec<FeatureVector>, labels: Vec<f64>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::domain("feature and label counts differ"));
        }
        if let Some(first) = features.first() {
            if features.iter().any(|f| !f.compatible(first)) {
                return Err(Error::domain("training features must share kind, length and grid"));
            }
        }
        let finite =
            features.iter().all(|f| f.values.iter().all(|v| v.is_finite())) && labels.iter().all(|y| y.is_finite());
        if !finite {
            return Err(Error::domain("training data must be finite"));
        }
        Ok(TrainingSet { features, labels })
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn check_query(&self, q: &FeatureVector) -> Result<()> {
        match self.features.first() {
            Some(f) if !f.compatible(q) => Err(Error::domain("query layout differs from the training features")),
            _ => Ok(()),
        }
    }

    /// Row-major Gram matrix of the feature inner product.
    fn gram(&self) -> Vec<f64> {
        let n = self.len();
        let mut g = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = l2_inner(&self.features[i], &self.features[j]).expect("homogeneous training set");
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        g
    }
}

/// Coordinates of `v` in the isometric Euclidean embedding.
fn embed(v: &FeatureVector) -> Vec<f64> {
    let root_step = v.grid.map_or(1.0, |g| libm::sqrt(g.step));
    v.values.iter().enumerate().map(|(i, x)| if i < v.h0_len { *x } else { x * root_step }).collect()
}

/// Inverse of [`embed`] for a vector with the layout of `like`.
fn unembed(like: &FeatureVector, e: &[f64]) -> FeatureVector {
    let root_step = like.grid.map_or(1.0, |g| libm::sqrt(g.step));
    let values = e.iter().enumerate().map(|(i, x)| if i < like.h0_len { *x } else { x / root_step }).collect();
    like.with_values(values).expect("same length")
}
