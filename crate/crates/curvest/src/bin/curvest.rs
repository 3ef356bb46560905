use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use curvest::artifacts::emit_plot_data;
use curvest::config::{ExperimentConfig, Mode};
use curvest::error::{CurvestError, Result};
use curvest::io;
use curvest::pipeline::{self, ExperimentReport};
use curvest_core::geometry::{equilateral_persistence, sample_disk, triangle_birth_death, Curvature, TriangleSides};
use curvest_core::landscape::{average_vectors, landscape_from_diagram, FeatureKind, FeatureVector, LandscapeGrid};
use curvest_core::learn::{quantile_train, svr_train, TrainingSet};
use curvest_core::persistence::{h0_death_vector, h1_diagram_with, RipsOptions};
use serde_json::json;

#[derive(Parser)]
#[command(name = "curvest", version, about = "Estimate surface curvature from persistent homology of sampled points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    H0,
    H1,
    H0h1,
}

impl From<Kind> for FeatureKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::H0 => FeatureKind::H0,
            Kind::H1 => FeatureKind::H1,
            Kind::H0h1 => FeatureKind::H0H1,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Distance,
    Ordinal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Svr,
    Quantile,
}

#[derive(Subcommand)]
enum Command {
    /// Čech birth, death and persistence of a geodesic triangle.
    Triangle {
        /// Side lengths, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sides: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        curvature: f64,
    },
    /// Sample points uniformly from the unit disk.
    Sample {
        #[arg(long, allow_hyphen_values = true)]
        curvature: f64,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        seed: u64,
        /// Repetition index of the random stream.
        #[arg(long, default_value_t = 0)]
        repetition: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pairwise geodesic distances of a point file.
    Distmat {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        curvature: f64,
        /// Replace distances by their ranks.
        #[arg(long)]
        ordinal: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Degree-0 and degree-1 Vietoris-Rips persistence of a distance matrix.
    Persist {
        #[arg(long)]
        distances: PathBuf,
        #[arg(long, default_value_t = 1 << 26)]
        max_entries: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Averaged feature vectors, from diagram files or by sampling curvatures.
    Featurize {
        /// Diagram files to average into one vector.
        #[arg(long, num_args = 1.., conflicts_with = "curvatures")]
        diagrams: Vec<PathBuf>,
        /// Curvatures to sample, comma separated; uses the experiment config.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        curvatures: Vec<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "h0h1")]
        kind: Kind,
        /// Landscape grid defaults for diagram input.
        #[arg(long, value_enum, default_value = "distance")]
        mode: CliMode,
        /// Curvature label for diagram input.
        #[arg(long, allow_hyphen_values = true)]
        label: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a support vector or quantile regression model to labeled features.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, default_value = "svr")]
        method: Method,
        #[arg(long = "C", default_value_t = 100.0)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a model to feature vectors.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a full experiment. Any config field can be set with `--key=value`,
    /// nested fields with dots, e.g. `--svr.C=50`.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a report and optionally regenerate its plot data.
    Report {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        plots: Option<PathBuf>,
    },
}

const EXPERIMENT_FLAGS: [&str; 4] = ["config", "seed", "out", "help"];

/// Splits `--key=value` config overrides from the flags clap knows about.
fn split_overrides(args: Vec<String>) -> (Vec<String>, Vec<(String, String)>) {
    if args.get(1).map(String::as_str) != Some("experiment") {
        return (args, Vec::new());
    }
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    for a in args {
        match a.strip_prefix("--").and_then(|s| s.split_once('=')) {
            Some((k, v)) if !EXPERIMENT_FLAGS.contains(&k) => overrides.push((k.to_owned(), v.to_owned())),
            _ => rest.push(a),
        }
    }
    (rest, overrides)
}

fn main() -> ExitCode {
    let (args, overrides) = split_overrides(std::env::args().collect());
    let cli = Cli::parse_from(args);
    match run(cli.command, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn curvature(k: f64) -> Result<Curvature> {
    Ok(Curvature::new(k)?)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cmd: Command, overrides: &[(String, String)]) -> Result<()> {
    match cmd {
        Command::Triangle { sides, curvature: k } => {
            if sides.len() != 3 {
                return Err(CurvestError::config("--sides takes exactly three lengths"));
            }
            let t = TriangleSides::new(sides[0], sides[1], sides[2], curvature(k)?)?;
            let bd = triangle_birth_death(&t)?;
            let mut out = serde_json::to_value(bd).expect("serializable");
            let (a, b, c) = t.sides();
            out["sides"] = json!([a, b, c]);
            out["curvature"] = json!(k);
            if a == c {
                out["equilateralPersistence"] = json!(equilateral_persistence(a, curvature(k)?)?);
            }
            print_json(&out);
        }
        Command::Sample { curvature: k, points, seed, repetition, out } => {
            let mut rng = pipeline::stream(seed, pipeline::SAMPLE_STREAM, k, repetition);
            io::write_points(&out, &sample_disk(curvature(k)?, points, &mut rng)?)?;
        }
        Command::Distmat { points, curvature: k, ordinal, out } => {
            let d = pipeline::distance_matrix(&io::read_points(&points)?, curvature(k)?)?;
            io::write_distance_matrix(&out, &if ordinal { pipeline::ordinal_transform(&d) } else { d })?;
        }
        Command::Persist { distances, max_entries, out } => {
            let d = io::read_distance_matrix(&distances)?;
            let h1 = h1_diagram_with(&d, &RipsOptions { max_entries, ..RipsOptions::default() })?;
            io::write_diagrams(&out, &h0_death_vector(&d)?, &h1)?;
        }
        Command::Featurize { diagrams, curvatures, config, seed, kind, mode, label, out } => {
            let kind = FeatureKind::from(kind);
            let rows = if !diagrams.is_empty() {
                let grid = match mode {
                    CliMode::Distance => LandscapeGrid::distance_default(),
                    CliMode::Ordinal => LandscapeGrid::ordinal_default(),
                };
                let vs = diagrams
                    .iter()
                    .map(|p| {
                        let (h0, h1) = io::read_diagrams(p)?;
                        let l = FeatureVector::from_landscape(&landscape_from_diagram(&h1, &grid));
                        Ok(FeatureVector::concat(&FeatureVector::from_death_vector(&h0), &l)?.select(kind)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                vec![(label, average_vectors(&vs)?)]
            } else if !curvatures.is_empty() {
                let cfg = load_config(config.as_deref(), seed, &[])?;
                let fs = pipeline::build_features(&curvatures, &cfg)?;
                curvatures.iter().zip(fs).map(|(k, f)| Ok((Some(*k), f.select(kind)?))).collect::<Result<_>>()?
            } else {
                return Err(CurvestError::config("featurize needs --diagrams or --curvatures"));
            };
            io::write_features(&out, &rows)?;
        }
        Command::Train { features, method, c, epsilon, tau, out } => {
            let rows = io::read_features(&features)?;
            let labels = rows
                .iter()
                .map(|(k, _)| k.ok_or_else(|| CurvestError::format(&features, "training rows need a K label")))
                .collect::<Result<Vec<_>>>()?;
            let set = TrainingSet::new(rows.into_iter().map(|(_, f)| f).collect(), labels)?;
            let fit = match method {
                Method::Svr => svr_train(&set, c, epsilon)?,
                Method::Quantile => quantile_train(&set, tau, c)?,
            };
            if !fit.converged {
                eprintln!(
                    "warning: solver stopped after {} iterations, duality gap {}",
                    fit.iterations, fit.duality_gap
                );
            }
            io::write_model(&out, &fit.model)?;
        }
        Command::Predict { model, features, out } => {
            let m = io::read_model(&model)?;
            let rows = io::read_features(&features)?;
            let preds = rows.iter().map(|(k, f)| Ok(vec![*k, Some(m.predict(f)?)])).collect::<Result<Vec<_>>>()?;
            io::write_table(&out, &["K".to_owned(), "prediction".to_owned()], preds)?;
        }
        Command::Experiment { config, seed, out } => {
            let cfg = load_config(config.as_deref(), seed, overrides)?;
            let result = pipeline::run_experiment(&cfg, Some(&out))?;
            print_summary(&result.report);
        }
        Command::Report { report, plots } => {
            let r: ExperimentReport = io::read_json(&report)?;
            print_summary(&r);
            if let Some(dir) = plots {
                emit_plot_data(&r, &dir)?;
            }
        }
    }
    Ok(())
}

fn load_config(path: Option<&Path>, seed: u64, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut all = overrides.to_vec();
    all.push(("seed".to_owned(), seed.to_string()));
    match path {
        Some(p) => ExperimentConfig::from_file(p, &all),
        None => ExperimentConfig::layered(&json!({}), &all),
    }
}

fn print_summary(r: &ExperimentReport) {
    let mode = match r.mode {
        Mode::Distance => "distance",
        Mode::Ordinal => "ordinal",
    };
    println!("mode {mode}, {} test curvatures", r.per_test.len());
    println!("{:<6} {:>10} {:>10} {:>10} {:>10}", "kind", "knn", "svr", "pca", "|rho|");
    let cell = |v: Option<&f64>| v.map_or("-".to_owned(), |x| format!("{x:.4}"));
    for (kind, res) in &r.by_kind {
        println!(
            "{:<6} {:>10} {:>10} {:>10} {:>10}",
            kind.name(),
            cell(res.rmse.get("knn")),
            cell(res.rmse.get("svr")),
            cell(res.rmse.get("pca")),
            cell(res.pca_spearman.map(f64::abs).as_ref()),
        );
    }
    for (tau, cov) in r.quantile_taus.iter().zip(&r.quantile_coverage) {
        println!("quantile {tau}: coverage {cov:.3}");
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
}
