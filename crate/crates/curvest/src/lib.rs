//! Experiment pipeline, file formats and command line for estimating the
//! curvature of a surface from persistent homology of sampled points.
//!
//! The algorithms live in [`curvest_core`]; this crate adds seeded,
//! parallel orchestration ([`pipeline`]), configuration ([`config`]), CSV and
//! JSON formats ([`io`]) and plot-ready output ([`artifacts`]).

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;

pub use config::{ExperimentConfig, Mode};
pub use error::{CurvestError, Result};
pub use pipeline::{run_experiment, ExperimentReport};
