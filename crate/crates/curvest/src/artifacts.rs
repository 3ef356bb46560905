//! Experiment artifacts and plot-ready tables.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::io::{write_features, write_json, write_model, write_table, write_text};
use crate::pipeline::{ExperimentOutput, ExperimentReport, LabeledFeatures};

/// Writes the report, timing, configuration, features, models and plot data.
pub fn write_experiment(dir: &Path, cfg: &ExperimentConfig, out: &ExperimentOutput) -> Result<()> {
    write_json(&dir.join("report.json"), &out.report)?;
    write_json(&dir.join("timing.json"), &out.timing)?;
    write_json(&dir.join("config.json"), cfg)?;
    write_labeled(&dir.join("train_features.csv"), &out.train)?;
    write_labeled(&dir.join("test_features.csv"), &out.test)?;
    write_model(&dir.join("svr_model.json"), &out.svr_model)?;
    for (tau, m) in out.report.quantile_taus.iter().zip(&out.quantile_models) {
        write_model(&dir.join(format!("quantile_{tau}.json")), m)?;
    }
    emit_plot_data(&out.report, &dir.join("plots"))
}

fn write_labeled(path: &Path, f: &LabeledFeatures) -> Result<()> {
    if f.features.is_empty() {
        return Ok(());
    }
    let rows: Vec<_> = f.curvatures.iter().zip(&f.features).map(|(k, v)| (Some(*k), v.clone())).collect();
    write_features(path, &rows)
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

/// Scatter, quantile band, PCA projection and variance-share tables, plus a
/// static SVG scatter per method.
pub fn emit_plot_data(report: &ExperimentReport, dir: &Path) -> Result<()> {
    write_table(
        &dir.join("scatter.csv"),
        &header(&["trueK", "knn", "svr", "pca"]),
        report.per_test.iter().map(|r| vec![Some(r.true_k), Some(r.knn), Some(r.svr), r.pca]),
    )?;
    let mut qh = vec!["trueK".to_owned()];
    qh.extend(report.quantile_taus.iter().map(|t| format!("q{t}")));
    write_table(
        &dir.join("quantiles.csv"),
        &qh,
        report
            .per_test
            .iter()
            .map(|r| std::iter::once(Some(r.true_k)).chain(r.quantiles.iter().map(|q| Some(*q))).collect()),
    )?;
    for (kind, res) in &report.by_kind {
        let name = kind.name();
        write_table(
            &dir.join(format!("pca_projection_{name}.csv")),
            &header(&["trueK", "pc1", "pc2"]),
            report
                .per_test
                .iter()
                .zip(&res.pca_projection)
                .map(|(r, s)| vec![Some(r.true_k), s.first().copied(), s.get(1).copied()]),
        )?;
        write_table(
            &dir.join(format!("pca_variance_{name}.csv")),
            &header(&["component", "share"]),
            res.pca_variance_share.iter().enumerate().map(|(i, s)| vec![Some((i + 1) as f64), Some(*s)]),
        )?;
        let truths: Vec<f64> = report.per_test.iter().map(|r| r.true_k).collect();
        for (method, est) in [("knn", &res.knn), ("svr", &res.svr), ("pca", &res.pca)] {
            let pts: Vec<(f64, f64)> = truths.iter().copied().zip(est.iter().copied()).collect();
            write_text(
                &dir.join(format!("scatter_{method}_{name}.svg")),
                &scatter_svg(&pts, &format!("{method} {name}")),
            )?;
        }
    }
    Ok(())
}

/// True curvature against estimate on [-2.5, 2.5]², with the diagonal.
fn scatter_svg(points: &[(f64, f64)], title: &str) -> String {
    const SIZE: f64 = 320.0;
    const PAD: f64 = 30.0;
    let map = |v: f64| PAD + (v.clamp(-2.5, 2.5) + 2.5) / 5.0 * (SIZE - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{PAD}" y="18" font-size="12" font-family="sans-serif">{title}</text>"#);
    let (lo, hi) = (map(-2.5), map(2.5));
    let _ =
        writeln!(s, r#"<rect x="{lo}" y="{lo}" width="{}" height="{}" fill="none" stroke="black"/>"#, hi - lo, hi - lo);
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray"/>"#,
        map(-2.0),
        SIZE - map(-2.0),
        map(2.0),
        SIZE - map(2.0)
    );
    for (x, y) in points {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="steelblue"/>"#, map(*x), SIZE - map(*y));
    }
    s.push_str("</svg>\n");
    s
}
