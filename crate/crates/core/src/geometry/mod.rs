//! Model surfaces of constant curvature restricted to the unit disk.
//!
//! Points are given in geodesic polar coordinates `(r, theta)` about the disk
//! center. The surface is realised as the Euclidean plane (`K = 0`), the sphere
//! of radius `1/sqrt(K)` (`K > 0`) or the Poincaré disk of radius
//! `1/sqrt(-K)` (`K < 0`).

mod distance;
mod sampling;
mod triangle;
pub(crate) mod trig;

pub use distance::{disk_area, geodesic_distance};
pub use sampling::{disk_cdf, inverse_cdf_radius, sample_disk};
pub use triangle::{equilateral_persistence, triangle_birth_death, TriangleBirthDeath, TriangleSides};

use core::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Largest curvature for which the unit disk still embeds in the sphere.
pub const MAX_SPHERICAL_CURVATURE: f64 = PI * PI;

/// Constant Gaussian curvature of a model surface.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Curvature(f64);

impl Curvature {
    pub const FLAT: Curvature = Curvature(0.0);

    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::domain("curvature must be finite"));
        }
        Ok(Curvature(k))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Radius `1/sqrt(|K|)` of the model sphere or Poincaré disk.
    pub fn radius(self) -> Option<f64> {
        if self.0 == 0.0 {
            None
        } else {
            Some(1.0 / libm::sqrt(libm::fabs(self.0)))
        }
    }

    pub(crate) fn check_unit_disk(self) -> Result<()> {
        if self.0 > MAX_SPHERICAL_CURVATURE {
            return Err(Error::domain("unit disk does not embed for K > pi^2"));
        }
        Ok(())
    }
}

impl TryFrom<f64> for Curvature {
    type Error = Error;

    fn try_from(k: f64) -> Result<Self> {
        Curvature::new(k)
    }
}

/// Geodesic polar coordinates of a point in the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::domain("polar radius must lie in [0, 1]"));
        }
        if !(0.0..TAU).contains(&theta) {
            return Err(Error::domain("polar angle must lie in [0, 2pi)"));
        }
        Ok(PolarPoint { r, theta })
    }

    /// Like [`PolarPoint::new`] but reduces the angle into `[0, 2pi)`.
    pub fn wrapped(r: f64, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::domain("polar angle must be finite"));
        }
        let mut t = libm::fmod(theta, TAU);
        if t < 0.0 {
            t += TAU;
        }
        if t >= TAU {
            t = 0.0;
        }
        PolarPoint::new(r, t)
    }
}
