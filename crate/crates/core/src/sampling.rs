//! Seeded random generators for geometric objects and for membership samples.
//!
//! Every function takes the generator explicitly; there is no hidden state.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use rand::Rng;

use crate::ball_model::{BallPoint, Cap, SphereDirection};
use crate::hypercone::{centering_boost, BallCone, Hyperball};
use crate::ball_model::lorentz_ball_action;
use crate::minkowski::LorentzTransform;
use crate::numeric::orthonormal_frame;

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Uniform point of the Euclidean ball of radius `max_radius < 1`.
pub fn ball_point<R: Rng + ?Sized>(rng: &mut R, max_radius: f64) -> BallPoint {
    let r = max_radius * rng.random::<f64>().cbrt();
    BallPoint::clamped(unit_vector(rng) * r)
}

/// Area-uniform direction in the open cap.
pub fn cap_direction<R: Rng + ?Sized>(rng: &mut R, cap: &Cap) -> Vector3<f64> {
    let c = cap.half_angle().cos();
    // open cap: keep strictly away from the rim
    let z = loop {
        let z: f64 = rng.random_range(c..=1.0);
        if z > c {
            break z;
        }
    };
    let phi: f64 = rng.random_range(0.0..TAU);
    let (e1, e2) = orthonormal_frame(cap.n());
    let r = (1.0 - z * z).max(0.0).sqrt();
    cap.n() * z + (e1 * phi.cos() + e2 * phi.sin()) * r
}

/// A random pointed cone with apex in `|a| ≤ 0.7` and half-angle in `[lo, hi]`
/// degrees, with pointedness at least 0.05.
pub fn cone<R: Rng + ?Sized>(rng: &mut R, lo_deg: f64, hi_deg: f64) -> BallCone {
    loop {
        let apex = ball_point(rng, 0.7);
        let axis = unit_vector(rng);
        let psi = rng.random_range(lo_deg..=hi_deg).to_radians();
        let Ok(cap) = Cap::new(SphereDirection::unchecked(axis), psi) else {
            continue;
        };
        if let Ok(k) = BallCone::new(apex, cap) {
            if k.pointedness() > 0.05 {
                return k;
            }
        }
    }
}

/// A point of the open cone: a random point of a random generator segment.
pub fn cone_interior<R: Rng + ?Sized>(rng: &mut R, k: &BallCone) -> BallPoint {
    let q = cap_direction(rng, k.base());
    let a = k.apex().coords();
    let s = loop {
        let s: f64 = rng.random();
        if s > 0.0 {
            break s;
        }
    };
    BallPoint::clamped(a + (q - a) * s)
}

/// A point of the lateral surface: a random point of a random rim generator.
pub fn cone_lateral<R: Rng + ?Sized>(rng: &mut R, k: &BallCone) -> BallPoint {
    let q = k.rim_point(rng.random_range(0.0..TAU));
    let a = k.apex().coords();
    let s: f64 = rng.random_range(0.0..1.0);
    BallPoint::clamped(a + (q - a) * s)
}

/// A point of the closed hyperball.
pub fn hyperball_point<R: Rng + ?Sized>(rng: &mut R, o: &Hyperball) -> BallPoint {
    let rho = o.radius * rng.random::<f64>().cbrt();
    let r = (rho / o.shell.tau()).tanh();
    let at_origin = BallPoint::clamped(unit_vector(rng) * r);
    let back = centering_boost(&o.center).inverse();
    lorentz_ball_action(&back, &at_origin)
}

/// A boost of rapidity at most `max_rapidity` composed with a rotation.
pub fn lorentz<R: Rng + ?Sized>(rng: &mut R, max_rapidity: f64) -> LorentzTransform {
    let chi = rng.random_range(0.0..=max_rapidity);
    let boost = LorentzTransform::boost(&unit_vector(rng), chi).expect("unit direction");
    let rot = LorentzTransform::rotation(&unit_vector(rng), rng.random_range(0.0..PI))
        .expect("unit axis");
    boost.compose(&rot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_respect_their_regions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let k = cone(&mut rng, 5.0, 70.0);
            for _ in 0..50 {
                assert!(k.contains(cone_interior(&mut rng, &k).coords()));
            }
        }
    }

    #[test]
    fn hyperball_samples_are_within_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let shell = crate::Hyperboloid::new(1.5).unwrap();
        let o = Hyperball::new(ball_point(&mut rng, 0.8), 0.7, shell).unwrap();
        for _ in 0..200 {
            let p = hyperball_point(&mut rng, &o);
            let d = crate::ball_model::ball_distance(&p, &o.center, &shell);
            assert!(d <= o.radius + 1e-9);
        }
    }
}
