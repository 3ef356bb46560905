//! Plain-text file formats: CSV for points, distance matrices, diagrams and
//! feature tables, JSON for models and feature metadata. Numbers are written
//! in shortest round-trip form, so reading back recovers them exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use curvest_core::geometry::PolarPoint;
use curvest_core::landscape::{FeatureKind, FeatureVector, LandscapeGrid};
use curvest_core::learn::{Loss, SvrModel};
use curvest_core::persistence::{DeathVector, DistanceMatrix, PersistenceDiagram, PersistencePair};
use serde::{Deserialize, Serialize};

use crate::error::{CurvestError, Result};

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CurvestError::io(dir, e))?;
    }
    fs::File::create(path).map_err(|e| CurvestError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    create(path)?.write_all(text.as_bytes()).map_err(|e| CurvestError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CurvestError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CurvestError::format(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CurvestError::format(path, e))
}

/// Writes a header and rows of numbers, `None` as an empty field.
pub fn write_table(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<Option<f64>>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let err = |e: csv::Error| CurvestError::format(path, e);
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default())).map_err(err)?;
    }
    w.flush().map_err(|e| CurvestError::io(path, e))
}

/// Header names and rows of a numeric table.
pub type Table = (Vec<String>, Vec<Vec<Option<f64>>>);

/// Reads a numeric table with a header; empty fields become `None`.
pub fn read_table(path: &Path) -> Result<Table> {
    let text = read_text(path)?;
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let header = r.headers().map_err(|e| CurvestError::format(path, e))?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CurvestError::format(path, e))?;
        let row = rec
            .iter()
            .map(|f| if f.is_empty() { Ok(None) } else { f.parse::<f64>().map(Some) })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| CurvestError::format(path, e))?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn expect_header(path: &Path, header: &[String], want: &[&str]) -> Result<()> {
    if header.iter().map(String::as_str).ne(want.iter().copied()) {
        return Err(CurvestError::format(path, format!("expected header `{}`", want.join(","))));
    }
    Ok(())
}

fn required(path: &Path, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| CurvestError::format(path, "missing value"))
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

pub fn write_points(path: &Path, points: &[PolarPoint]) -> Result<()> {
    write_table(path, &strings(&["r", "theta"]), points.iter().map(|p| vec![Some(p.r), Some(p.theta)]))
}

pub fn read_points(path: &Path) -> Result<Vec<PolarPoint>> {
    let (header, rows) = read_table(path)?;
    expect_header(path, &header, &["r", "theta"])?;
    rows.into_iter()
        .map(|row| PolarPoint::new(required(path, row[0])?, required(path, row[1])?).map_err(CurvestError::from))
        .collect()
}

pub fn write_distance_matrix(path: &Path, d: &DistanceMatrix) -> Result<()> {
    let mut text = format!("# m={}\ni,j,distance\n", d.size());
    for (i, j, v) in d.pairs() {
        text.push_str(&format!("{i},{j},{v}\n"));
    }
    write_text(path, &text)
}

pub fn read_distance_matrix(path: &Path) -> Result<DistanceMatrix> {
    let text = read_text(path)?;
    let m: usize = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# m="))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| CurvestError::format(path, "first line must be `# m=<count>`"))?;
    let (header, rows) = read_table(path)?;
    expect_header(path, &header, &["i", "j", "distance"])?;
    let mut entries = vec![f64::NAN; m * m.saturating_sub(1) / 2];
    for row in rows {
        let (i, j, v) = (required(path, row[0])?, required(path, row[1])?, required(path, row[2])?);
        let (i, j) = (i as usize, j as usize);
        if !(i < j && j < m) {
            return Err(CurvestError::format(path, format!("pair ({i}, {j}) out of range")));
        }
        entries[i * (2 * m - i - 1) / 2 + (j - i - 1)] = v;
    }
    if entries.iter().any(|v| v.is_nan()) {
        return Err(CurvestError::format(path, "missing pairs"));
    }
    Ok(DistanceMatrix::new(m, entries)?)
}

/// Degree-0 pairs are written as `(0, death)`, one per death-vector entry.
pub fn write_diagrams(path: &Path, h0: &DeathVector, h1: &PersistenceDiagram) -> Result<()> {
    let rows = h0
        .as_slice()
        .iter()
        .map(|d| vec![Some(0.0), Some(0.0), Some(*d)])
        .chain(h1.pairs.iter().map(|p| vec![Some(1.0), Some(p.birth), Some(p.death)]));
    write_table(path, &strings(&["dim", "birth", "death"]), rows)
}

pub fn read_diagrams(path: &Path) -> Result<(DeathVector, PersistenceDiagram)> {
    let (header, rows) = read_table(path)?;
    expect_header(path, &header, &["dim", "birth", "death"])?;
    let (mut deaths, mut pairs) = (Vec::new(), Vec::new());
    for row in rows {
        let (dim, birth, death) = (required(path, row[0])?, required(path, row[1])?, required(path, row[2])?);
        match dim as i64 {
            0 => deaths.push(death),
            1 => pairs.push(PersistencePair { birth, death }),
            _ => return Err(CurvestError::format(path, "dimension must be 0 or 1")),
        }
    }
    Ok((DeathVector::from_deaths(deaths), PersistenceDiagram::new(1, pairs)))
}

/// Layout of the rows of a feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FeatureMeta {
    pub kind: FeatureKind,
    pub h0_len: usize,
    pub grid: Option<LandscapeGrid>,
    pub len: usize,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

/// One row per vector: `K` (empty when unknown), then the values. The layout
/// goes to a JSON sidecar next to the table.
pub fn write_features(path: &Path, rows: &[(Option<f64>, FeatureVector)]) -> Result<()> {
    let Some((_, first)) = rows.first() else {
        return Err(CurvestError::format(path, "no feature vectors to write"));
    };
    if rows.iter().any(|(_, f)| !f.compatible(first)) {
        return Err(CurvestError::format(path, "feature vectors differ in layout"));
    }
    let meta = FeatureMeta { kind: first.kind, h0_len: first.h0_len, grid: first.grid, len: first.len() };
    let mut header = vec!["K".to_owned()];
    header.extend((0..first.len()).map(|i| format!("v{i}")));
    write_table(
        path,
        &header,
        rows.iter().map(|(k, f)| std::iter::once(*k).chain(f.values.iter().map(|v| Some(*v))).collect()),
    )?;
    write_json(&sidecar_path(path), &meta)
}

pub fn read_features(path: &Path) -> Result<Vec<(Option<f64>, FeatureVector)>> {
    let meta: FeatureMeta = read_json(&sidecar_path(path))?;
    let (header, rows) = read_table(path)?;
    if header.len() != meta.len + 1 || header[0] != "K" {
        return Err(CurvestError::format(path, "header does not match the sidecar layout"));
    }
    rows.into_iter()
        .map(|row| {
            let values = row[1..].iter().map(|v| required(path, *v)).collect::<Result<Vec<_>>>()?;
            let fv = FeatureVector { kind: meta.kind, h0_len: meta.h0_len, grid: meta.grid, values };
            Ok((row[0], fv))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ModelFile {
    kind: FeatureKind,
    h0_len: usize,
    weights: Vec<f64>,
    bias: f64,
    #[serde(rename = "C")]
    c: f64,
    epsilon: f64,
    loss: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    grid: Option<LandscapeGrid>,
}

pub fn write_model(path: &Path, m: &SvrModel) -> Result<()> {
    let (loss, tau) = match m.loss {
        Loss::EpsilonInsensitive => ("epsilonInsensitive", None),
        Loss::Pinball { tau } => ("pinball", Some(tau)),
    };
    let file = ModelFile {
        kind: m.weights.kind,
        h0_len: m.weights.h0_len,
        weights: m.weights.values.clone(),
        bias: m.bias,
        c: m.c,
        epsilon: m.epsilon,
        loss: loss.to_owned(),
        tau,
        grid: m.weights.grid,
    };
    write_json(path, &file)
}

pub fn read_model(path: &Path) -> Result<SvrModel> {
    let f: ModelFile = read_json(path)?;
    let loss = match (f.loss.as_str(), f.tau) {
        ("epsilonInsensitive", None) => Loss::EpsilonInsensitive,
        ("pinball", Some(tau)) => Loss::Pinball { tau },
        _ => return Err(CurvestError::format(path, "loss must be epsilonInsensitive, or pinball with tau")),
    };
    let weights = FeatureVector { kind: f.kind, h0_len: f.h0_len, grid: f.grid, values: f.weights };
    Ok(SvrModel { weights, bias: f.bias, c: f.c, epsilon: f.epsilon, loss })
}
