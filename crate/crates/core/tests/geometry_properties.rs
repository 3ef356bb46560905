use std::f64::consts::{PI, TAU};

use curvest_core::geometry::{
    equilateral_persistence, geodesic_distance, triangle_birth_death, Curvature, PolarPoint, TriangleSides,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn k(v: f64) -> Curvature {
    Curvature::new(v).unwrap()
}

fn random_point(rng: &mut impl Rng) -> PolarPoint {
    PolarPoint::new(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..TAU)).unwrap()
}

/// Angle opposite side `c` in a triangle with sides `a`, `b`, `c` on the model
/// surface of curvature `kv`, by the classical laws of cosines.
fn angle(a: f64, b: f64, c: f64, kv: f64) -> f64 {
    let cos = if kv > 0.0 {
        let s = kv.sqrt();
        ((c * s).cos() - (a * s).cos() * (b * s).cos()) / ((a * s).sin() * (b * s).sin())
    } else if kv < 0.0 {
        let s = (-kv).sqrt();
        ((a * s).cosh() * (b * s).cosh() - (c * s).cosh()) / ((a * s).sinh() * (b * s).sinh())
    } else {
        (a * a + b * b - c * c) / (2.0 * a * b)
    };
    cos.clamp(-1.0, 1.0).acos()
}

#[test]
fn distance_is_a_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for kv in [-2.0, -1.0, -1e-8, 0.0, 1e-8, 1.0, 2.0, 9.0] {
        let curv = k(kv);
        for _ in 0..1000 {
            let (p, q, r) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
            let d = |x, y| geodesic_distance(x, y, curv).unwrap();
            assert_eq!(d(p, p), 0.0);
            assert!(d(p, q) >= 0.0);
            assert!((d(p, q) - d(q, p)).abs() <= 1e-14);
            assert!(d(p, r) <= d(p, q) + d(q, r) + 1e-12, "K={kv}");
        }
    }
}

#[test]
fn equilateral_persistence_is_monotone_in_curvature() {
    for a in [0.25, 0.5, 1.0] {
        let ps: Vec<f64> = (-200..=200).map(|i| equilateral_persistence(a, k(i as f64 / 100.0)).unwrap()).collect();
        for w in ps.windows(2) {
            assert!(w[1] > w[0], "a={a}");
            assert!(w[1] - w[0] <= 5.0 * 0.01);
        }
    }
}

#[test]
fn equilateral_triangle_maximizes_persistence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for kv in [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0] {
        let best = equilateral_persistence(1.0, k(kv)).unwrap();
        let mut checked = 0;
        while checked < 10_000 {
            let (b, c) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
            let Ok(sides) = TriangleSides::new(1.0, b, c, k(kv)) else { continue };
            let bd = triangle_birth_death(&sides).unwrap();
            assert!(bd.persistence <= best + 1e-9, "K={kv} sides (1, {b}, {c}): {} > {best}", bd.persistence);
            checked += 1;
        }
    }
}

#[test]
fn circumcenter_is_equidistant_and_interior() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kv in [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0] {
        let curv = k(kv);
        let mut checked = 0;
        while checked < 2_000 {
            let (x, y) = (rng.gen_range(0.55..=1.0), rng.gen_range(0.55..=1.0));
            let Ok(sides) = TriangleSides::new(1.0, x, y, curv) else { continue };
            let bd = triangle_birth_death(&sides).unwrap();
            if !bd.has_cycle {
                continue;
            }
            let (a, b, c) = sides.sides();
            let t = bd.circumcenter_offset.unwrap();
            // chart: M at the centre, BC along the horizontal axis, A above
            let psi = angle(bd.median, a / 2.0, c, kv);
            let pb = PolarPoint::new(a / 2.0, PI).unwrap();
            let pc = PolarPoint::new(a / 2.0, 0.0).unwrap();
            let pa = PolarPoint::new(bd.median, PI - psi).unwrap();
            let pp = PolarPoint::new(t, PI / 2.0).unwrap();
            let d = |p, q| geodesic_distance(p, q, curv).unwrap();
            assert!((d(pa, pb) - c).abs() < 1e-10);
            assert!((d(pa, pc) - b).abs() < 1e-10);
            let (ra, rb, rc) = (d(pp, pa), d(pp, pb), d(pp, pc));
            assert!((ra - rb).abs() <= 1e-10 && (ra - rc).abs() <= 1e-10, "K={kv}: {ra} {rb} {rc}");
            assert!((bd.death - rb).abs() <= 1e-10);
            let total = angle(ra, rb, c, kv) + angle(rb, rc, a, kv) + angle(rc, ra, b, kv);
            assert!((total - TAU).abs() < 1e-6, "K={kv}: angle sum {total}");
            checked += 1;
        }
    }
}
