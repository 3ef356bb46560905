//! Curvature-generalised trigonometric functions.
//!
//! With `s = sqrt(|K|)`:
//!
//! * `sin_k(x)  = sin(s x)/s`, `x`, or `sinh(s x)/s`
//! * `vers_k(x) = (1 - cos(s x))/K`, `x^2/2`, or `(cosh(s x) - 1)/(-K)`
//!
//! The law of cosines on `M_K` then reads, for every sign of `K`,
//! `vers_k(c) = vers_k(a - b) + sin_k(a) sin_k(b) (1 - cos(gamma))`,
//! which has no cancellation at small sides or small curvature.

/// Below this magnitude of `K`, fourth-order Taylor expansions are used.
pub(crate) const SERIES_THRESHOLD: f64 = 1e-6;

pub(crate) fn sin_k(x: f64, k: f64) -> f64 {
    if libm::fabs(k) < SERIES_THRESHOLD {
        let x2 = x * x;
        x * (1.0 - k * x2 / 6.0 + k * k * x2 * x2 / 120.0)
    } else if k > 0.0 {
        let s = libm::sqrt(k);
        libm::sin(s * x) / s
    } else {
        let s = libm::sqrt(-k);
        libm::sinh(s * x) / s
    }
}

pub(crate) fn vers_k(x: f64, k: f64) -> f64 {
    if libm::fabs(k) < SERIES_THRESHOLD {
        let x2 = x * x;
        x2 * (0.5 - k * x2 / 24.0 + k * k * x2 * x2 / 720.0)
    } else if k > 0.0 {
        let h = libm::sin(libm::sqrt(k) * x / 2.0);
        2.0 * h * h / k
    } else {
        let h = libm::sinh(libm::sqrt(-k) * x / 2.0);
        2.0 * h * h / -k
    }
}

/// Inverse of [`vers_k`] on `x >= 0` (and `x < pi/sqrt(K)` when `K > 0`).
pub(crate) fn vers_k_inv(v: f64, k: f64) -> f64 {
    let v = if v < 0.0 { 0.0 } else { v };
    if libm::fabs(k) < SERIES_THRESHOLD {
        let u2 = 2.0 * v;
        libm::sqrt(u2 + k * u2 * u2 / 12.0 + k * k * u2 * u2 * u2 / 90.0)
    } else if k > 0.0 {
        let s = libm::sqrt(k);
        let arg = libm::sqrt(k * v / 2.0);
        2.0 * libm::asin(if arg > 1.0 { 1.0 } else { arg }) / s
    } else {
        let s = libm::sqrt(-k);
        2.0 * libm::asinh(s * libm::sqrt(v / 2.0)) / s
    }
}
