//! Experiment stages: sampling, distances, persistence, features, averaging,
//! and evaluation of the regressors on held-out curvatures.
//!
//! Every random draw comes from a ChaCha stream keyed by the seed, a purpose
//! tag, the curvature and the repetition index, so results do not depend on
//! scheduling or thread count.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use curvest_core::geometry::{geodesic_distance, sample_disk, Curvature, PolarPoint};
use curvest_core::landscape::{average_vectors, landscape_from_diagram, FeatureKind, FeatureVector, LandscapeGrid};
use curvest_core::learn::{
    knn_estimate, pca_curvature_estimate, pca_fit, quantile_train, rmse, spearman, svr_train, SvrModel, TrainingSet,
};
use curvest_core::persistence::{h0_death_vector, h1_diagram_with, DistanceMatrix, RipsOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Mode};
use crate::error::{CurvestError, Result};

pub const SAMPLE_STREAM: u64 = 1;
const TEST_CURVATURE_STREAM: u64 = 2;

/// Random stream for one purpose, curvature and repetition.
pub fn stream(seed: u64, tag: u64, k: f64, rep: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    key[16..24].copy_from_slice(&k.to_bits().to_le_bytes());
    key[24..].copy_from_slice(&rep.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

pub fn distance_matrix(points: &[PolarPoint], k: Curvature) -> curvest_core::Result<DistanceMatrix> {
    if points.len() < 2 {
        return Err(curvest_core::Error::Domain("a distance matrix needs at least two points".into()));
    }
    DistanceMatrix::from_fn(points.len(), |i, j| geodesic_distance(points[i], points[j], k))
}

/// Replaces each entry by its 1-based rank; ties go to the earlier `(i, j)`.
pub fn ordinal_transform(d: &DistanceMatrix) -> DistanceMatrix {
    let e = d.entries();
    let mut order: Vec<usize> = (0..e.len()).collect();
    order.sort_by(|&a, &b| e[a].total_cmp(&e[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; e.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = (r + 1) as f64;
    }
    DistanceMatrix::new(d.size(), ranks).expect("ranks are valid distances")
}

/// Checks that the entries are exactly `{1, ..., C(m, 2)}`.
pub fn check_ordinal(d: &DistanceMatrix) -> curvest_core::Result<()> {
    let n = d.entries().len();
    let mut seen = vec![false; n];
    for &v in d.entries() {
        let ok = v >= 1.0 && v <= n as f64 && v.fract() == 0.0 && !std::mem::replace(&mut seen[v as usize - 1], true);
        if !ok {
            return Err(curvest_core::Error::Numerical(
                "ordinal matrix entries are not a permutation of 1..=C(m,2)".into(),
            ));
        }
    }
    Ok(())
}

/// Counts ordinal-invariant checks performed by [`sample_features`].
pub static ORDINAL_CHECKS: AtomicUsize = AtomicUsize::new(0);

/// The distance matrix fed to persistence for one sample.
pub fn persistence_input(k: f64, rep: usize, cfg: &ExperimentConfig) -> Result<DistanceMatrix> {
    let curv = Curvature::new(k).map_err(CurvestError::stage("sample", Some(k)))?;
    let mut rng = stream(cfg.seed, SAMPLE_STREAM, k, rep as u64);
    let points = sample_disk(curv, cfg.points_per_sample, &mut rng).map_err(CurvestError::stage("sample", Some(k)))?;
    let d = distance_matrix(&points, curv).map_err(CurvestError::stage("distance", Some(k)))?;
    Ok(match cfg.mode {
        Mode::Distance => d,
        Mode::Ordinal => {
            let o = ordinal_transform(&d);
            check_ordinal(&o).map_err(CurvestError::stage("ordinal", Some(k)))?;
            ORDINAL_CHECKS.fetch_add(1, Ordering::Relaxed);
            o
        }
    })
}

/// Landscape grid in the units of the persistence input. In ordinal mode the
/// configured grid is read as a fraction of the number of pairs.
pub fn effective_grid(cfg: &ExperimentConfig) -> LandscapeGrid {
    match cfg.mode {
        Mode::Distance => cfg.grid,
        Mode::Ordinal => {
            let m = cfg.points_per_sample as f64;
            let pairs = m * (m - 1.0) / 2.0;
            LandscapeGrid { start: cfg.grid.start * pairs, step: cfg.grid.step * pairs, ..cfg.grid }
        }
    }
}

/// Death vector and landscape of a single distance matrix, concatenated.
pub fn matrix_features(d: &DistanceMatrix, cfg: &ExperimentConfig) -> curvest_core::Result<FeatureVector> {
    let h0 = FeatureVector::from_death_vector(&h0_death_vector(d)?);
    let opts = RipsOptions { max_entries: cfg.max_entries, ..RipsOptions::default() };
    let diagram = h1_diagram_with(d, &opts)?;
    let h1 = FeatureVector::from_landscape(&landscape_from_diagram(&diagram, &effective_grid(cfg)));
    FeatureVector::concat(&h0, &h1)
}

/// `H0H1` features of repetition `rep` at curvature `k`.
pub fn sample_features(k: f64, rep: usize, cfg: &ExperimentConfig) -> Result<FeatureVector> {
    let d = persistence_input(k, rep, cfg)?;
    matrix_features(&d, cfg).map_err(CurvestError::stage("persistence", Some(k)))
}

/// Mean `H0H1` features over the configured repetitions.
pub fn average_features(k: f64, cfg: &ExperimentConfig) -> Result<FeatureVector> {
    let reps: Vec<FeatureVector> =
        (0..cfg.repetitions).into_par_iter().map(|rep| sample_features(k, rep, cfg)).collect::<Result<_>>()?;
    average_vectors(&reps).map_err(CurvestError::stage("average", Some(k)))
}

pub fn build_features(ks: &[f64], cfg: &ExperimentConfig) -> Result<Vec<FeatureVector>> {
    ks.par_iter().map(|&k| average_features(k, cfg)).collect()
}

/// Held-out curvatures: the configured list, or uniform draws from [-2, 2].
pub fn test_curvatures(cfg: &ExperimentConfig) -> Vec<f64> {
    if let Some(ks) = &cfg.test_curvatures {
        return ks.clone();
    }
    let mut rng = stream(cfg.seed, TEST_CURVATURE_STREAM, 0.0, 0);
    (0..cfg.test_count).map(|_| rng.gen_range(-2.0..=2.0)).collect()
}

/// Curvatures with their feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatures {
    pub curvatures: Vec<f64>,
    pub features: Vec<FeatureVector>,
}

impl LabeledFeatures {
    pub fn select(&self, kind: FeatureKind) -> curvest_core::Result<Vec<FeatureVector>> {
        self.features.iter().map(|f| f.select(kind)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestRow {
    pub true_k: f64,
    pub knn: f64,
    pub svr: f64,
    pub pca: Option<f64>,
    /// Predictions at each of the report's `quantileTaus`.
    pub quantiles: Vec<f64>,
}

/// Results of every method on one feature kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KindResults {
    pub knn: Vec<f64>,
    pub svr: Vec<f64>,
    /// First principal component rescaled to [-2, 2]; orientation arbitrary.
    pub pca: Vec<f64>,
    /// Scores on the first two principal components.
    pub pca_projection: Vec<Vec<f64>>,
    pub pca_variance_share: Vec<f64>,
    pub pca_spearman: Option<f64>,
    /// Method name to RMSE; PCA is scored with the better of both orientations.
    pub rmse: BTreeMap<String, f64>,
    pub svr_converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub mode: Mode,
    pub feature_kind: FeatureKind,
    pub train_curvatures: Vec<f64>,
    pub per_test: Vec<TestRow>,
    pub rmse: BTreeMap<String, f64>,
    pub pca_variance_share: Vec<f64>,
    pub pca_spearman: Option<f64>,
    pub quantile_taus: Vec<f64>,
    /// Fraction of true curvatures below each quantile prediction.
    pub quantile_coverage: Vec<f64>,
    /// Test points whose quantile predictions are not ordered like the taus.
    pub quantile_crossings: usize,
    pub by_kind: BTreeMap<FeatureKind, KindResults>,
    pub warnings: Vec<String>,
    pub config_echo: serde_json::Value,
}

/// Everything a run produces besides the report itself.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub train: LabeledFeatures,
    pub test: LabeledFeatures,
    pub svr_model: SvrModel,
    pub quantile_models: Vec<SvrModel>,
    /// Seconds per stage.
    pub timing: BTreeMap<String, f64>,
}

fn pool(cfg: &ExperimentConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| CurvestError::config(format!("thread pool: {e}")))
}

/// Runs the whole experiment; when `out` is given, writes every artifact there.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let pool = pool(cfg)?;
    let mut timing = BTreeMap::new();
    let start = Instant::now();

    let train_ks = cfg.train_grid.curvatures();
    let test_ks = test_curvatures(cfg);
    let t = Instant::now();
    let train = LabeledFeatures { features: pool.install(|| build_features(&train_ks, cfg))?, curvatures: train_ks };
    timing.insert("trainFeatures".to_owned(), t.elapsed().as_secs_f64());
    let t = Instant::now();
    let test = LabeledFeatures { features: pool.install(|| build_features(&test_ks, cfg))?, curvatures: test_ks };
    timing.insert("testFeatures".to_owned(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let (report, svr_model, quantile_models) = evaluate(cfg, &train, &test)?;
    timing.insert("learning".to_owned(), t.elapsed().as_secs_f64());
    timing.insert("total".to_owned(), start.elapsed().as_secs_f64());

    let output = ExperimentOutput { report, train, test, svr_model, quantile_models, timing };
    if let Some(dir) = out {
        crate::artifacts::write_experiment(dir, cfg, &output)?;
    }
    Ok(output)
}

/// Trains and scores every method on precomputed features.
pub fn evaluate(
    cfg: &ExperimentConfig,
    train: &LabeledFeatures,
    test: &LabeledFeatures,
) -> Result<(ExperimentReport, SvrModel, Vec<SvrModel>)> {
    let learn = |stage| CurvestError::stage(stage, None);
    let mut by_kind = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut main_svr = None;
    for kind in [FeatureKind::H0, FeatureKind::H1, FeatureKind::H0H1] {
        let set = TrainingSet::new(train.select(kind)?, train.curvatures.clone()).map_err(learn("training set"))?;
        let queries = test.select(kind)?;
        let (results, model) = evaluate_kind(cfg, kind, &set, &queries, &test.curvatures, &mut warnings)?;
        if kind == cfg.feature_kind {
            main_svr = Some(model);
        }
        by_kind.insert(kind, results);
    }

    let set =
        TrainingSet::new(train.select(cfg.feature_kind)?, train.curvatures.clone()).map_err(learn("training set"))?;
    let queries = test.select(cfg.feature_kind)?;
    let mut quantile_models = Vec::new();
    let mut quantile_preds = Vec::new();
    for &tau in &cfg.quantile_taus {
        let fit = quantile_train(&set, tau, cfg.quantile_c).map_err(learn("quantile regression"))?;
        if !fit.converged {
            warnings.push(format!("quantile regression at tau = {tau} stopped with duality gap {}", fit.duality_gap));
        }
        let preds: Vec<f64> = queries
            .iter()
            .map(|q| fit.model.predict(q))
            .collect::<curvest_core::Result<_>>()
            .map_err(learn("quantile regression"))?;
        quantile_models.push(fit.model);
        quantile_preds.push(preds);
    }

    let main = &by_kind[&cfg.feature_kind];
    let n = test.curvatures.len();
    let per_test: Vec<TestRow> = (0..n)
        .map(|i| TestRow {
            true_k: test.curvatures[i],
            knn: main.knn[i],
            svr: main.svr[i],
            pca: main.pca.get(i).copied(),
            quantiles: quantile_preds.iter().map(|p| p[i]).collect(),
        })
        .collect();

    let mut rmse_map = main.rmse.clone();
    let mut coverage = Vec::new();
    for (tau, preds) in cfg.quantile_taus.iter().zip(&quantile_preds) {
        if n > 0 {
            coverage.push(test.curvatures.iter().zip(preds).filter(|(k, q)| k < q).count() as f64 / n as f64);
            if *tau == 0.5 {
                rmse_map.insert("quantileMedian".to_owned(), rmse(preds, &test.curvatures)?);
            }
        }
    }
    let mut tau_order: Vec<usize> = (0..cfg.quantile_taus.len()).collect();
    tau_order.sort_by(|&a, &b| cfg.quantile_taus[a].total_cmp(&cfg.quantile_taus[b]));
    let quantile_crossings =
        per_test.iter().filter(|row| tau_order.windows(2).any(|w| row.quantiles[w[0]] > row.quantiles[w[1]])).count();

    let report = ExperimentReport {
        mode: cfg.mode,
        feature_kind: cfg.feature_kind,
        train_curvatures: train.curvatures.clone(),
        per_test,
        rmse: rmse_map,
        pca_variance_share: main.pca_variance_share.clone(),
        pca_spearman: main.pca_spearman,
        quantile_taus: cfg.quantile_taus.clone(),
        quantile_coverage: coverage,
        quantile_crossings,
        by_kind,
        warnings,
        config_echo: cfg.echo(),
    };
    Ok((report, main_svr.expect("configured kind is evaluated"), quantile_models))
}

fn evaluate_kind(
    cfg: &ExperimentConfig,
    kind: FeatureKind,
    set: &TrainingSet,
    queries: &[FeatureVector],
    truths: &[f64],
    warnings: &mut Vec<String>,
) -> Result<(KindResults, SvrModel)> {
    let learn = |stage| CurvestError::stage(stage, None);
    let knn: Vec<f64> = queries
        .iter()
        .map(|q| knn_estimate(set, q, cfg.knn_k))
        .collect::<curvest_core::Result<_>>()
        .map_err(learn("nearest neighbours"))?;
    let fit = svr_train(set, cfg.svr.c, cfg.svr.epsilon_for(kind)).map_err(learn("support vector regression"))?;
    if !fit.converged {
        warnings.push(format!("{} regression stopped with duality gap {}", kind.name(), fit.duality_gap));
    }
    let svr: Vec<f64> = queries
        .iter()
        .map(|q| fit.model.predict(q))
        .collect::<curvest_core::Result<_>>()
        .map_err(learn("support vector regression"))?;

    let mut res = KindResults {
        knn,
        svr,
        pca: Vec::new(),
        pca_projection: Vec::new(),
        pca_variance_share: Vec::new(),
        pca_spearman: None,
        rmse: BTreeMap::new(),
        svr_converged: fit.converged,
    };
    if truths.is_empty() {
        return Ok((res, fit.model));
    }
    res.rmse.insert("knn".to_owned(), rmse(&res.knn, truths)?);
    res.rmse.insert("svr".to_owned(), rmse(&res.svr, truths)?);

    if queries.len() >= 2 {
        let components = cfg.pca_components.min(queries[0].len());
        let pca = pca_fit(queries, components).map_err(learn("principal components"))?;
        if !pca.converged {
            warnings.push(format!("{} principal components did not reach tolerance", kind.name()));
        }
        let est = pca_curvature_estimate(&pca.model, queries).map_err(learn("principal components"))?;
        let flipped: Vec<f64> = est.iter().map(|e| -e).collect();
        res.rmse.insert("pca".to_owned(), rmse(&est, truths)?.min(rmse(&flipped, truths)?));
        res.pca_spearman = spearman(&est, truths).ok();
        res.pca_projection = queries
            .iter()
            .map(|q| pca.model.project(q).map(|s| s.into_iter().take(2).collect()))
            .collect::<curvest_core::Result<_>>()?;
        res.pca_variance_share = pca.model.variance_share;
        res.pca = est;
    }
    Ok((res, fit.model))
}
