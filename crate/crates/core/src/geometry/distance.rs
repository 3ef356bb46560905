use core::f64::consts::PI;

use super::trig::vers_k;
use super::{Curvature, PolarPoint};
use crate::error::{Error, Result};

/// Geodesic distance between two points of the unit disk in `M_K`.
///
/// All three cases are evaluated from polar differences, so nearby points do
/// not lose precision to cancellation between Cartesian coordinates:
///
/// * `K = 0`: `|x - y|^2 = (r1 - r2)^2 + 4 r1 r2 sin^2(dtheta/2)`.
/// * `K > 0`: the angle `atan2(|x × y|, x·y)` between the embedded vectors,
///   computed through its half-angle form
///   `2 atan2(sqrt(h), sqrt(1 - h))` with
///   `h = sin^2((phi1 - phi2)/2) + sin(phi1) sin(phi2) sin^2(dtheta/2)`.
/// * `K < 0`: `2R atanh(|z - w| / |1 - z conj(w)|)` in the Poincaré disk with
///   the squared moduli expanded in the same way.
pub fn geodesic_distance(p: PolarPoint, q: PolarPoint, k: Curvature) -> Result<f64> {
    k.check_unit_disk()?;
    let half = libm::sin((p.theta - q.theta) / 2.0);
    let ang = half * half;
    let kv = k.value();
    let d = if kv == 0.0 {
        let dr = p.r - q.r;
        libm::sqrt(dr * dr + 4.0 * p.r * q.r * ang)
    } else if kv > 0.0 {
        let big_r = 1.0 / libm::sqrt(kv);
        let (phi1, phi2) = (p.r / big_r, q.r / big_r);
        let hd = libm::sin((p.r - q.r) / big_r / 2.0);
        let h = hd * hd + libm::sin(phi1) * libm::sin(phi2) * ang;
        let h = h.clamp(0.0, 1.0);
        2.0 * big_r * libm::atan2(libm::sqrt(h), libm::sqrt(1.0 - h))
    } else {
        let big_r = 1.0 / libm::sqrt(-kv);
        let (a, b) = (p.r / (2.0 * big_r), q.r / (2.0 * big_r));
        let (z, w) = (libm::tanh(a), libm::tanh(b));
        let dz = libm::sinh((p.r - q.r) / (2.0 * big_r)) / (libm::cosh(a) * libm::cosh(b));
        let cross = 4.0 * z * w * ang;
        let num = dz * dz + cross;
        let one_minus = 1.0 - z * w;
        let den = one_minus * one_minus + cross;
        2.0 * big_r * libm::atanh(libm::sqrt(num / den))
    };
    if !d.is_finite() || d < 0.0 {
        return Err(Error::domain("geodesic distance is not finite"));
    }
    Ok(d)
}

/// Area of a geodesic disk of radius `r` in `M_K`.
pub fn disk_area(r: f64, k: Curvature) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain("disk radius must be finite and non-negative"));
    }
    if let (true, Some(big_r)) = (k.value() > 0.0, k.radius()) {
        if r > PI * big_r {
            return Err(Error::domain("spherical disk radius exceeds pi/sqrt(K)"));
        }
    }
    // 2pi vers_k(r) equals the three-case formula, including its Taylor
    // expansion near K = 0.
    Ok(2.0 * PI * vers_k(r, k.value()))
}
