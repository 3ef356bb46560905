//! Experiment configuration: JSON files layered over mode defaults, with
//! command-line overrides addressed by dotted key paths.

use std::path::Path;

use curvest_core::landscape::{FeatureKind, LandscapeGrid};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CurvestError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Mode {
    Distance,
    Ordinal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl TrainGrid {
    /// Curvatures `lo, lo + step, ...` up to `hi`, rounded to 12 decimals.
    pub fn curvatures(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|i| round12(self.lo + i as f64 * self.step)).collect()
    }
}

fn round12(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SvrParams {
    #[serde(rename = "C")]
    pub c: f64,
    pub epsilon: f64,
    /// Tube width for death-vector-only features, when it differs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_h0: Option<f64>,
}

impl SvrParams {
    pub fn epsilon_for(&self, kind: FeatureKind) -> f64 {
        match kind {
            FeatureKind::H0 => self.epsilon_h0.unwrap_or(self.epsilon),
            _ => self.epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub points_per_sample: usize,
    pub repetitions: usize,
    pub train_grid: TrainGrid,
    pub test_count: usize,
    /// Fixed test curvatures; drawn uniformly from [-2, 2] when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_curvatures: Option<Vec<f64>>,
    pub feature_kind: FeatureKind,
    pub knn_k: usize,
    pub svr: SvrParams,
    pub quantile_taus: Vec<f64>,
    #[serde(rename = "quantileC")]
    pub quantile_c: f64,
    pub pca_components: usize,
    pub seed: u64,
    pub grid: LandscapeGrid,
    /// Worker threads; 0 uses every core.
    pub parallelism: usize,
    /// Budget for stored simplices per H1 reduction.
    pub max_entries: usize,
}

impl ExperimentConfig {
    /// Small-sample defaults for a mode.
    pub fn desk(mode: Mode) -> Self {
        let (knn_k, svr, grid) = match mode {
            Mode::Distance => {
                (3, SvrParams { c: 100.0, epsilon: 0.0, epsilon_h0: None }, LandscapeGrid::distance_default())
            }
            Mode::Ordinal => {
                (5, SvrParams { c: 10.0, epsilon: 0.2, epsilon_h0: Some(1.0) }, LandscapeGrid::ordinal_default())
            }
        };
        ExperimentConfig {
            mode,
            points_per_sample: 200,
            repetitions: 20,
            train_grid: TrainGrid { lo: -2.0, hi: 2.0, step: 0.2 },
            test_count: 30,
            test_curvatures: None,
            feature_kind: FeatureKind::H0H1,
            knn_k,
            svr,
            quantile_taus: vec![0.05, 0.5, 0.95],
            quantile_c: 100.0,
            pca_components: 10,
            seed: 0,
            grid,
            parallelism: 0,
            max_entries: 1 << 26,
        }
    }

    /// Defaults for `mode`, overlaid by `user` (a JSON object) and then by
    /// `overrides` of the form `(dotted.key, value)`. Values are parsed as
    /// JSON and fall back to strings.
    pub fn layered(user: &Value, overrides: &[(String, String)]) -> Result<Self> {
        let user = user.as_object().ok_or_else(|| CurvestError::config("config must be a JSON object"))?;
        let mut merged = Value::Object(user.clone());
        for (key, raw) in overrides {
            set_path(&mut merged, key, parse_scalar(raw))?;
        }
        let mode: Mode = match merged.get("mode") {
            Some(m) => serde_json::from_value(m.clone()).map_err(|e| CurvestError::config(format!("mode: {e}")))?,
            None => Mode::Distance,
        };
        let mut base = serde_json::to_value(ExperimentConfig::desk(mode)).expect("serializable");
        merge(&mut base, &merged);
        let cfg: ExperimentConfig = serde_json::from_value(base).map_err(|e| CurvestError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CurvestError::io(path, e))?;
        let user: Value =
            serde_json::from_str(&text).map_err(|e| CurvestError::config(format!("{}: {e}", path.display())))?;
        Self::layered(&user, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(CurvestError::config(msg));
        let g = &self.train_grid;
        if !(g.step > 0.0) || !(-2.0 <= g.lo && g.lo <= g.hi && g.hi <= 2.0) {
            return bad("trainGrid must satisfy -2 <= lo <= hi <= 2 and step > 0");
        }
        if self.points_per_sample < 3 {
            return bad("pointsPerSample must be at least 3");
        }
        if self.repetitions < 1 {
            return bad("repetitions must be at least 1");
        }
        if self.knn_k < 1 || self.knn_k > g.curvatures().len() {
            return bad("knnK must lie between 1 and the number of training curvatures");
        }
        if !(self.svr.c > 0.0) || !(self.quantile_c > 0.0) {
            return bad("costs must be positive");
        }
        if !(self.svr.epsilon >= 0.0) || self.svr.epsilon_h0.is_some_and(|e| !(e >= 0.0)) {
            return bad("epsilon must be nonnegative");
        }
        if self.quantile_taus.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return bad("quantileTaus must lie in (0, 1)");
        }
        if self.pca_components < 1 {
            return bad("pcaComponents must be at least 1");
        }
        if let Some(ks) = &self.test_curvatures {
            if ks.len() != self.test_count {
                return bad("testCount must equal the number of testCurvatures");
            }
            if ks.iter().any(|k| !(-2.0..=2.0).contains(k)) {
                return bad("testCurvatures must lie in [-2, 2]");
            }
        }
        LandscapeGrid::new(self.grid.start, self.grid.step, self.grid.points, self.grid.levels)
            .map_err(|e| CurvestError::config(format!("grid: {e}")))?;
        Ok(())
    }

    /// The configuration as echoed in reports. Thread count is left out so
    /// that reports do not depend on it.
    pub fn echo(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        if let Value::Object(map) = &mut v {
            map.remove("parallelism");
        }
        v
    }
}

fn parse_scalar(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()))
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CurvestError::config(format!("malformed override key `{key}`")));
    }
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let map = node
            .as_object_mut()
            .ok_or_else(|| CurvestError::config(format!("`{key}` does not name an object field")))?;
        node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    let map =
        node.as_object_mut().ok_or_else(|| CurvestError::config(format!("`{key}` does not name an object field")))?;
    map.insert(parts[parts.len() - 1].to_owned(), value);
    Ok(())
}

fn merge(base: &mut Value, over: &Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}
