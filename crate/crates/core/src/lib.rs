//! Curvature estimation from the persistent homology of points sampled on
//! unit disks of constant curvature.
//!
//! The crate is `no_std` (with `alloc`) and holds the algorithmic parts:
//!
//! * [`geometry`]: model spaces of constant curvature, distances, disk areas,
//!   inversion sampling and the closed-form Čech theory of triangles.
//! * [`persistence`]: Vietoris–Rips persistent homology in degrees 0 and 1,
//!   with a brute-force oracle for small inputs.
//! * [`landscape`]: death vectors, persistence landscapes and their averages.
//! * [`learn`]: weighted nearest neighbours, linear support vector and
//!   quantile regression, and PCA in the landscape geometry.
//!
//! IO, orchestration and the command line live in the `curvest` crate.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod landscape;
pub mod learn;
pub mod persistence;

pub use error::{Error, Result};
