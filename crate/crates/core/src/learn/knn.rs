use crate::error::{Error, Result};
use crate::landscape::FeatureVector;

use super::{embed, TrainingSet};

/// Inverse-distance weighted mean of the labels of the `k` nearest training
/// vectors. A query at distance zero from training vectors returns the mean
/// of their labels.
pub fn knn_estimate(train: &TrainingSet, query: &FeatureVector, k: usize) -> Result<f64> {
    if train.is_empty() {
        return Err(Error::domain("nearest neighbours need a nonempty training set"));
    }
    if k == 0 || k > train.len() {
        return Err(Error::domain("k must lie in 1..=training size"));
    }
    train.check_query(query)?;
    let q = embed(query);
    let mut dist: alloc::vec::Vec<(f64, usize)> = train
        .features()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let d2: f64 = embed(f).iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum();
            (libm::sqrt(d2), i)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let labels = train.labels();
    let exact: alloc::vec::Vec<f64> = dist.iter().take_while(|(d, _)| *d == 0.0).map(|(_, i)| labels[*i]).collect();
    if !exact.is_empty() {
        return Ok(exact.iter().sum::<f64>() / exact.len() as f64);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &(d, i) in &dist[..k] {
        num += labels[i] / d;
        den += 1.0 / d;
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::DeathVector;
    use alloc::vec;
    use alloc::vec::Vec;

    fn fv(x: &[f64]) -> FeatureVector {
        // bypass the descending sort so that coordinates stay as given
        let mut v = FeatureVector::from_death_vector(&DeathVector::from_deaths(vec![0.0; x.len()]));
        v.values = x.to_vec();
        v
    }

    fn set(xs: &[f64], ys: &[f64]) -> TrainingSet {
        TrainingSet::new(xs.iter().map(|x| fv(&[*x])).collect(), ys.to_vec()).unwrap()
    }

    #[test]
    fn inverse_distance_weights() {
        let t = set(&[0.0, 1.0, 4.0], &[0.0, 1.0, 4.0]);
        assert!((knn_estimate(&t, &fv(&[2.0]), 3).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(knn_estimate(&t, &fv(&[2.0]), 1).unwrap(), 1.0);
    }

    #[test]
    fn exact_matches() {
        let t = set(&[0.0, 1.0, 1.0, 4.0], &[0.0, 1.0, 3.0, 4.0]);
        assert_eq!(knn_estimate(&t, &fv(&[4.0]), 3).unwrap(), 4.0);
        assert_eq!(knn_estimate(&t, &fv(&[1.0]), 1).unwrap(), 2.0);
    }

    #[test]
    fn errors() {
        let t = set(&[0.0, 1.0], &[0.0, 1.0]);
        assert!(knn_estimate(&t, &fv(&[0.5]), 3).is_err());
        assert!(knn_estimate(&t, &fv(&[0.5, 1.0]), 1).is_err());
        let empty = TrainingSet::new(Vec::new(), Vec::new()).unwrap();
        assert!(knn_estimate(&empty, &fv(&[0.5]), 1).is_err());
    }

    #[test]
    fn scale_invariance() {
        let xs = [[0.3, -1.0], [2.0, 0.5], [-0.7, 0.1], [1.1, 1.9], [0.0, -0.4]];
        let ys = [0.1, -0.5, 1.2, 0.8, -1.9];
        let q = [0.4, 0.2];
        for s in [1e-3, 0.5, 7.0, 1e4] {
            let base = TrainingSet::new(xs.iter().map(|x| fv(x)).collect(), ys.to_vec()).unwrap();
            let scaled = TrainingSet::new(xs.iter().map(|x| fv(&[x[0] * s, x[1] * s])).collect(), ys.to_vec()).unwrap();
            let a = knn_estimate(&base, &fv(&q), 3).unwrap();
            let b = knn_estimate(&scaled, &fv(&[q[0] * s, q[1] * s]), 3).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }
}
