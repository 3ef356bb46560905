use core::f64::consts::TAU;

use alloc::vec::Vec;
use rand::Rng;

use super::trig::{vers_k, vers_k_inv};
use super::{Curvature, PolarPoint};
use crate::error::{Error, Result};

/// Fraction of the unit disk's area lying within radius `r` of its center.
pub fn disk_cdf(r: f64, k: Curvature) -> Result<f64> {
    k.check_unit_disk()?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain("radius must lie in [0, 1]"));
    }
    Ok(vers_k(r, k.value()) / vers_k(1.0, k.value()))
}

/// Radius `r` with `disk_cdf(r, K) = u`.
///
/// Closed forms: `sqrt(u)` for `K = 0`,
/// `(2/sqrt(K)) asin(sqrt(u) sin(sqrt(K)/2))` for `K > 0` and
/// `(2/sqrt(-K)) asinh(sqrt(u) sinh(sqrt(-K)/2))` for `K < 0`.
pub fn inverse_cdf_radius(u: f64, k: Curvature) -> Result<f64> {
    k.check_unit_disk()?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::domain("inverse CDF argument must lie in [0, 1]"));
    }
    if u == 1.0 {
        return Ok(1.0);
    }
    let kv = k.value();
    let r = if kv == 0.0 { libm::sqrt(u) } else { vers_k_inv(u * vers_k(1.0, kv), kv) };
    Ok(r.min(1.0))
}

/// Draws `m` points uniformly (with respect to area) from the unit disk.
pub fn sample_disk<R: Rng + ?Sized>(k: Curvature, m: usize, rng: &mut R) -> Result<Vec<PolarPoint>> {
    if m == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    k.check_unit_disk()?;
    (0..m)
        .map(|_| {
            let u: f64 = rng.gen();
            let theta = rng.gen::<f64>() * TAU;
            let r = inverse_cdf_radius(u, k)?;
            // gen::<f64>() < 1, but the product can round up to TAU
            PolarPoint::new(r, if theta >= TAU { 0.0 } else { theta })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::disk_area;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    #[test]
    fn boundary_values() {
        for &kv in &[-2.0, -1e-8, 0.0, 1e-8, 1.0, 2.0, 9.0] {
            assert_eq!(inverse_cdf_radius(0.0, k(kv)).unwrap(), 0.0);
            assert_eq!(inverse_cdf_radius(1.0, k(kv)).unwrap(), 1.0);
        }
        assert_eq!(inverse_cdf_radius(0.25, Curvature::FLAT).unwrap(), 0.5);
        assert!(inverse_cdf_radius(-0.01, Curvature::FLAT).is_err());
        assert!(inverse_cdf_radius(1.01, Curvature::FLAT).is_err());
    }

    fn area(r: f64, kv: f64) -> f64 {
        use core::f64::consts::PI;
        if kv > 0.0 {
            4.0 * PI / kv * libm::pow(libm::sin(r * libm::sqrt(kv) / 2.0), 2.0)
        } else if kv < 0.0 {
            4.0 * PI / -kv * libm::pow(libm::sinh(r * libm::sqrt(-kv) / 2.0), 2.0)
        } else {
            PI * r * r
        }
    }

    fn bisect_area_fraction(u: f64, kv: f64) -> f64 {
        let total = area(1.0, kv);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if area(mid, kv) / total < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn closed_form_agrees_with_bisection_on_area() {
        // Independent route: bisection on the area formula.
        let r = inverse_cdf_radius(0.5, k(2.0)).unwrap();
        assert!((r - bisect_area_fraction(0.5, 2.0)).abs() < 1e-10);
        assert!((r - 0.674_972_411_335_514_5).abs() < 1e-12);
        for &kv in &[-2.0, -0.5, 0.3, 1.7] {
            for &u in &[0.1, 0.37, 0.8] {
                let r = inverse_cdf_radius(u, k(kv)).unwrap();
                assert!((r - bisect_area_fraction(u, kv)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cdf_inverts_on_fine_grid() {
        for &kv in &[-2.0, -1.0, -1e-7, 0.0, 1e-7, 0.5, 1.0, 2.0] {
            let mut prev = 0.0;
            for i in 0..=1000 {
                let u = i as f64 / 1000.0;
                let r = inverse_cdf_radius(u, k(kv)).unwrap();
                assert!(r >= prev);
                prev = r;
                let back = disk_cdf(r, k(kv)).unwrap();
                assert!((back - u).abs() < 1e-10, "K={kv} u={u} back={back}");
            }
        }
    }

    #[test]
    fn near_zero_curvature_is_continuous() {
        for &u in &[0.1, 0.5, 0.9] {
            let flat = libm::sqrt(u);
            for &kv in &[1e-9, -1e-9, 0.99e-6, 1.01e-6, -1.01e-6] {
                let r = inverse_cdf_radius(u, k(kv)).unwrap();
                assert!((r - flat).abs() < 1e-6, "{kv} {u}");
            }
            let a = inverse_cdf_radius(u, k(0.999_999e-6)).unwrap();
            let b = inverse_cdf_radius(u, k(1.000_001e-6)).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_disk(k(-1.3), 50, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = sample_disk(k(-1.3), 50, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
        assert!(sample_disk(k(0.0), 0, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
    }

    #[test]
    fn flat_sample_matches_quarter_area_fraction() {
        let n = 100_000;
        let pts = sample_disk(Curvature::FLAT, n, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let frac = pts.iter().filter(|p| p.r <= 0.5).count() as f64 / n as f64;
        let sigma = libm::sqrt(0.25 * 0.75 / n as f64);
        assert!((frac - 0.25).abs() <= 3.0 * sigma, "{frac}");
    }

    #[test]
    fn hyperbolic_sample_matches_area_fraction() {
        let n = 100_000;
        let kk = k(-2.0);
        let pts = sample_disk(kk, n, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        for &r0 in &[0.25, 0.5, 0.75] {
            let p = disk_area(r0, kk).unwrap() / disk_area(1.0, kk).unwrap();
            let frac = pts.iter().filter(|q| q.r <= r0).count() as f64 / n as f64;
            let sigma = libm::sqrt(p * (1.0 - p) / n as f64);
            assert!((frac - p).abs() <= 3.0 * sigma, "r0={r0} {frac} {p}");
        }
    }
}
