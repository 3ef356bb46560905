use std::f64::consts::PI;

use curvest::artifacts::emit_plot_data;
use curvest::config::{ExperimentConfig, Mode, TrainGrid};
use curvest::io::read_table;
use curvest::pipeline::{
    average_features, build_features, check_ordinal, distance_matrix, evaluate, ordinal_transform, run_experiment,
    sample_features, test_curvatures, LabeledFeatures,
};
use curvest_core::geometry::{Curvature, PolarPoint};
use curvest_core::landscape::average_vectors;
use curvest_core::persistence::DistanceMatrix;
use proptest::prelude::*;

fn small(mode: Mode) -> ExperimentConfig {
    let mut c = ExperimentConfig::desk(mode);
    c.points_per_sample = 30;
    c.repetitions = 3;
    c.train_grid = TrainGrid { lo: -2.0, hi: 2.0, step: 1.0 };
    c.test_count = 4;
    c.pca_components = 3;
    c.seed = 17;
    c.parallelism = 2;
    c
}

fn pt(r: f64, theta: f64) -> PolarPoint {
    PolarPoint::new(r, theta).unwrap()
}

#[test]
fn distance_matrix_examples() {
    let k0 = Curvature::FLAT;
    let d = distance_matrix(&[pt(0.0, 1.0), pt(0.3, 2.0)], Curvature::new(-1.5).unwrap()).unwrap();
    assert_eq!(d.entries(), &[0.3]);
    let d = distance_matrix(&[pt(0.5, 0.0), pt(0.5, PI)], k0).unwrap();
    assert!((d.entries()[0] - 1.0).abs() < 1e-15);
    assert!(distance_matrix(&[pt(0.5, 0.0)], k0).is_err());

    let pts = [pt(0.1, 0.2), pt(0.9, 4.0), pt(0.5, 2.5), pt(0.7, 5.9)];
    let k = Curvature::new(1.3).unwrap();
    let d = distance_matrix(&pts, k).unwrap();
    let perm = [2, 0, 3, 1];
    let shuffled: Vec<PolarPoint> = perm.iter().map(|&i| pts[i]).collect();
    let e = distance_matrix(&shuffled, k).unwrap();
    assert_eq!(e, d.permuted(&perm).unwrap());
    let sorted = |m: &DistanceMatrix| {
        let mut v = m.entries().to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    assert_eq!(sorted(&d), sorted(&e));
}

#[test]
fn ordinal_examples() {
    let d = DistanceMatrix::new(3, vec![0.5, 0.2, 0.9]).unwrap();
    let o = ordinal_transform(&d);
    assert_eq!(o.entries(), &[2.0, 1.0, 3.0]);
    assert_eq!(ordinal_transform(&o), o);
    check_ordinal(&o).unwrap();
    let tied = DistanceMatrix::new(3, vec![0.4, 0.4, 0.1]).unwrap();
    assert_eq!(ordinal_transform(&tied).entries(), &[2.0, 3.0, 1.0]);
    assert!(check_ordinal(&DistanceMatrix::new(3, vec![1.0, 1.0, 3.0]).unwrap()).is_err());
    assert!(check_ordinal(&DistanceMatrix::new(3, vec![1.0, 2.5, 3.0]).unwrap()).is_err());
}

proptest! {
    #[test]
    fn ordinal_transform_ignores_monotone_maps(
        entries in prop::collection::vec(0.0..10.0f64, 15),
        slopes in prop::collection::vec(0.01..5.0f64, 10),
    ) {
        // strictly increasing piecewise-linear map with knots at 0, 1, ..., 9
        let f = |x: f64| {
            let mut y = 0.0;
            for (i, s) in slopes.iter().enumerate() {
                y += s * (x - i as f64).clamp(0.0, 1.0);
            }
            y + slopes[9] * (x - 10.0).max(0.0)
        };
        let d = DistanceMatrix::new(6, entries).unwrap();
        let o = ordinal_transform(&d);
        prop_assert_eq!(ordinal_transform(&d.map(f).unwrap()), o.clone());
        prop_assert!(check_ordinal(&o).is_ok());
    }
}

#[test]
fn averaging_stage() {
    let mut cfg = small(Mode::Distance);
    cfg.repetitions = 1;
    assert_eq!(average_features(0.5, &cfg).unwrap(), sample_features(0.5, 0, &cfg).unwrap());
    cfg.repetitions = 3;
    let manual: Vec<_> = (0..3).map(|r| sample_features(-1.0, r, &cfg).unwrap()).collect();
    assert_eq!(average_features(-1.0, &cfg).unwrap(), average_vectors(&manual).unwrap());
    assert_eq!(average_features(-1.0, &cfg).unwrap(), average_features(-1.0, &cfg).unwrap());
    assert_eq!(sample_features(-1.0, 0, &cfg).unwrap().len(), 29 + 401 * 30);
}

#[test]
fn empirical_average_concentrates() {
    let mut cfg = small(Mode::Distance);
    cfg.points_per_sample = 25;
    cfg.grid.levels = 5;
    let k = 0.7;
    cfg.seed = 1_000_000;
    cfg.repetitions = 800;
    let truth = average_features(k, &cfg).unwrap();
    let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let mut wins = 0;
    let trials = 20;
    for t in 0..trials {
        cfg.seed = t;
        cfg.repetitions = 25;
        let a25 = average_features(k, &cfg).unwrap();
        cfg.repetitions = 100;
        let a100 = average_features(k, &cfg).unwrap();
        if sup(&a100.values, &truth.values) <= sup(&a25.values, &truth.values) {
            wins += 1;
        }
    }
    assert!(wins as f64 >= 0.9 * trials as f64, "{wins}/{trials}");
}

#[test]
fn determinism_and_thread_independence() {
    let mut a = small(Mode::Ordinal);
    a.parallelism = 1;
    let mut b = a.clone();
    b.parallelism = 3;
    let ra = run_experiment(&a, None).unwrap().report;
    let rb = run_experiment(&b, None).unwrap().report;
    assert_eq!(serde_json::to_string(&ra).unwrap(), serde_json::to_string(&rb).unwrap());
    assert_eq!(ra.per_test.len(), 4);
    assert!(ra.rmse.values().all(|v| *v >= 0.0));
}

#[test]
fn stages_compose_into_the_experiment() {
    let cfg = small(Mode::Distance);
    let out = run_experiment(&cfg, None).unwrap();
    let train_ks = cfg.train_grid.curvatures();
    let test_ks = test_curvatures(&cfg);
    let train = LabeledFeatures { features: build_features(&train_ks, &cfg).unwrap(), curvatures: train_ks };
    let test = LabeledFeatures {
        features: test_ks.iter().map(|&k| average_features(k, &cfg).unwrap()).collect(),
        curvatures: test_ks,
    };
    assert_eq!(train, out.train);
    assert_eq!(test, out.test);
    let (report, _, _) = evaluate(&cfg, &train, &test).unwrap();
    assert_eq!(report, out.report);
}

#[test]
fn empty_test_set_still_writes_training_features() {
    let mut cfg = small(Mode::Distance);
    cfg.test_count = 0;
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&cfg, Some(dir.path())).unwrap();
    assert!(out.report.per_test.is_empty());
    assert!(out.report.rmse.is_empty());
    assert!(dir.path().join("train_features.csv").exists());
    let (header, rows) = read_table(&dir.path().join("plots/scatter.csv")).unwrap();
    assert_eq!(header, ["trueK", "knn", "svr", "pca"]);
    assert!(rows.is_empty());
}

#[test]
fn leaked_test_set_gives_exact_nearest_neighbours() {
    let mut cfg = small(Mode::Distance);
    let ks = cfg.train_grid.curvatures();
    cfg.test_count = ks.len();
    cfg.test_curvatures = Some(ks);
    let out = run_experiment(&cfg, None).unwrap();
    assert_eq!(out.report.rmse["knn"], 0.0);
}

#[test]
fn plot_tables_round_trip() {
    let cfg = small(Mode::Distance);
    let out = run_experiment(&cfg, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_plot_data(&out.report, dir.path()).unwrap();
    let (_, rows) = read_table(&dir.path().join("scatter.csv")).unwrap();
    assert_eq!(rows.len(), cfg.test_count);
    for (row, t) in rows.iter().zip(&out.report.per_test) {
        assert_eq!(row, &vec![Some(t.true_k), Some(t.knn), Some(t.svr), t.pca]);
    }
    let (header, rows) = read_table(&dir.path().join("quantiles.csv")).unwrap();
    assert_eq!(header, ["trueK", "q0.05", "q0.5", "q0.95"]);
    for (row, t) in rows.iter().zip(&out.report.per_test) {
        assert_eq!(row[1..].iter().map(|v| v.unwrap()).collect::<Vec<_>>(), t.quantiles);
    }
    let (_, rows) = read_table(&dir.path().join("pca_variance_H0H1.csv")).unwrap();
    let shares: Vec<f64> = rows.iter().map(|r| r[1].unwrap()).collect();
    assert_eq!(shares, out.report.pca_variance_share);
    assert!(dir.path().join("scatter_svr_H0H1.svg").exists());
}

#[test]
fn failures_carry_exit_codes() {
    let mut cfg = small(Mode::Distance);
    cfg.max_entries = 10;
    let err = run_experiment(&cfg, None).unwrap_err();
    assert_eq!(err.exit_code(), 4, "{err}");
    assert!(err.to_string().contains("persistence failed at K ="), "{err}");
    let mut cfg = small(Mode::Distance);
    cfg.knn_k = 50;
    assert_eq!(run_experiment(&cfg, None).unwrap_err().exit_code(), 2);
}
