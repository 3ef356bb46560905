//! Čech persistence of a single geodesic triangle.
//!
//! A triangle with sides `a >= b >= c` is born at `a/2`. Let `M` be the
//! midpoint of the longest side `BC` and `m = d(A, M)`. If `m <= a/2` the
//! three balls of radius `a/2` already share `M` and no cycle forms.
//! Otherwise the circumcenter lies inside the triangle and the cycle dies at
//! the circumradius.

use core::f64::consts::PI;

use super::trig::{sin_k, vers_k, vers_k_inv, SERIES_THRESHOLD};
use super::Curvature;
use crate::error::{Error, Result};

const BISECTION_TOLERANCE: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 200;

/// Side lengths of a non-degenerate geodesic triangle, sorted `a >= b >= c`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TriangleSides {
    a: f64,
    b: f64,
    c: f64,
    k: Curvature,
}

impl TriangleSides {
    /// Accepts the three lengths in any order.
    pub fn new(x: f64, y: f64, z: f64, k: Curvature) -> Result<Self> {
        let mut s = [x, y, z];
        if s.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::domain("triangle sides must be finite and positive"));
        }
        s.sort_by(|p, q| q.total_cmp(p));
        let [a, b, c] = s;
        if a >= b + c {
            return Err(Error::domain("triangle is degenerate or violates the triangle inequality"));
        }
        if let (true, Some(r)) = (k.value() > 0.0, k.radius()) {
            if a >= PI * r {
                return Err(Error::domain("spherical triangle side reaches pi/sqrt(K)"));
            }
            if a + b + c >= 2.0 * PI * r {
                return Err(Error::domain("spherical triangle perimeter reaches 2pi/sqrt(K)"));
            }
        }
        Ok(TriangleSides { a, b, c, k })
    }

    pub fn sides(&self) -> (f64, f64, f64) {
        (self.a, self.b, self.c)
    }

    pub fn curvature(&self) -> Curvature {
        self.k
    }
}

/// Birth, death and persistence ratio of a triangle in the Čech filtration.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct TriangleBirthDeath {
    pub birth: f64,
    pub death: f64,
    pub persistence: f64,
    pub has_cycle: bool,
    /// Distance from the vertex opposite the longest side to that side's midpoint.
    pub median: f64,
    /// Distance from the midpoint of the longest side to the circumcenter,
    /// measured along the perpendicular bisector towards the opposite vertex.
    pub circumcenter_offset: Option<f64>,
}

/// Closed-form persistence `d/b` of the equilateral triangle with side `a`.
pub fn equilateral_persistence(a: f64, k: Curvature) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("side length must be finite and positive"));
    }
    let kv = k.value();
    let two_over_sqrt3 = 2.0 / libm::sqrt(3.0);
    if libm::fabs(kv) < SERIES_THRESHOLD {
        let x = a * a * kv;
        return Ok(two_over_sqrt3 * (1.0 + x / 72.0 + 11.0 * x * x / 5760.0));
    }
    let p = if kv > 0.0 {
        let s = libm::sqrt(kv);
        if a >= 2.0 * PI / 3.0 / s {
            return Err(Error::domain("equilateral side must be below (2pi/3)/sqrt(K)"));
        }
        let arg = two_over_sqrt3 * libm::sin(a * s / 2.0);
        2.0 / (a * s) * libm::asin(arg.min(1.0))
    } else {
        let s = libm::sqrt(-kv);
        2.0 / (a * s) * libm::asinh(two_over_sqrt3 * libm::sinh(a * s / 2.0))
    };
    if !p.is_finite() {
        return Err(Error::numerical("equilateral persistence is not finite"));
    }
    Ok(p)
}

/// Čech birth and death of the triangle with the given sides.
pub fn triangle_birth_death(sides: &TriangleSides) -> Result<TriangleBirthDeath> {
    let (a, b, c) = sides.sides();
    let k = sides.curvature().value();
    let half = a / 2.0;
    let birth = half;

    // Angle at B, between BA (length c) and BC (length a).
    let one_minus_cos_b = ((vers_k(b, k) - vers_k(a - c, k)) / (sin_k(a, k) * sin_k(c, k))).clamp(0.0, 2.0);
    let median = vers_k_inv(vers_k(c - half, k) + sin_k(c, k) * sin_k(half, k) * one_minus_cos_b, k);

    if median <= half {
        return Ok(TriangleBirthDeath {
            birth,
            death: birth,
            persistence: 1.0,
            has_cycle: false,
            median,
            circumcenter_offset: None,
        });
    }

    // Angle psi at M between MA and MB, then the angle between MA and the
    // perpendicular bisector is |psi - pi/2|, whose versine is 1 - sin(psi).
    let one_minus_cos_psi =
        ((vers_k(c, k) - vers_k(median - half, k)) / (sin_k(median, k) * sin_k(half, k))).clamp(0.0, 2.0);
    let cos_psi = 1.0 - one_minus_cos_psi;
    let sin_psi = libm::sqrt((1.0 - cos_psi * cos_psi).max(0.0));
    let one_minus_sin_psi = cos_psi * cos_psi / (1.0 + sin_psi);

    let dist_b = |t: f64| vers_k_inv(vers_k(half - t, k) + sin_k(half, k) * sin_k(t, k), k);
    let dist_a = |t: f64| vers_k_inv(vers_k(median - t, k) + sin_k(median, k) * sin_k(t, k) * one_minus_sin_psi, k);
    let g = |t: f64| dist_a(t) - dist_b(t);

    let (mut lo, mut hi) = (0.0, median);
    if g(hi) >= 0.0 {
        return Err(Error::numerical("circumcenter is not bracketed on the perpendicular bisector"));
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if libm::fabs(gm) <= BISECTION_TOLERANCE || mid <= lo || mid >= hi {
            let death = 0.5 * (dist_a(mid) + dist_b(mid));
            return Ok(TriangleBirthDeath {
                birth,
                death,
                persistence: death / birth,
                has_cycle: true,
                median,
                circumcenter_offset: Some(mid),
            });
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::numerical("circumcenter bisection did not converge"))
}
