//! Moving cones between time-shells.
//!
//! A point on `H_σ` casts a causal shadow on `H_τ` which, in the ball, is the
//! hyperbolic ball of radius `τ c_{σ,τ}` around the same ball point. Both
//! constructions work with the cone's apex moved to the centre, where
//! distances to planes and to cones through the centre have closed forms.

use nalgebra::Vector3;
use rand::Rng;

use crate::ball_model::{shadow_parameter, BallPoint, Cap, Hyperboloid, SphereDirection};
use crate::hypercone::{cone_leq, hyperball_in_cone_margin, BallCone, Hyperball};
use crate::sampling::{cone_interior, cone_lateral};
use crate::{Error, Result, Tolerances};

fn check_shells(sigma: f64, tau: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0 && tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidInput(format!(
            "shell parameters must be positive, got sigma = {sigma}, tau = {tau}"
        )));
    }
    Ok(())
}

/// Cone with apex at the centre's side of the plane `n·x = c` and base the
/// cap above it. The apex is placed halfway between the plane and `−n`.
pub(super) fn half_space_cone(n: &Vector3<f64>, c: f64) -> Result<BallCone> {
    let apex = BallPoint::new(n * (0.5 * (c - 1.0)))?;
    let cap = Cap::new(SphereDirection::unchecked(*n), c.clamp(-1.0, 1.0).acos())?;
    BallCone::new(apex, cap)
}

/// A cone `K₀` whose closure contains every point within hyperbolic distance
/// `τ c_{σ,τ}` of `K`, so that the shadow of `C_σ(K)` on `H_τ` lies in `K₀`.
///
/// With the apex of `K` at the centre, `K` lies in the half-space `n·x ≥ 0`
/// and the distance `c` neighbourhood of that half-space lies in
/// `n·x ≥ −tanh c`. Any cone containing the lens beyond a slightly lower
/// plane will do.
pub fn enclose_shadow(k: &BallCone, sigma: f64, tau: f64) -> Result<BallCone> {
    check_shells(sigma, tau)?;
    let c = shadow_parameter(sigma, tau);
    if c == 0.0 {
        let psi = k.base().half_angle() + 1e-3;
        if let Ok(cap) = Cap::new(*k.base().axis(), psi) {
            if let Ok(k0) = BallCone::new(*k.apex(), cap) {
                return Ok(k0);
            }
        }
    }
    let th = c.tanh();
    if 1.0 - th < 1e-12 {
        return Err(Error::construction(
            "A9",
            format!("shadow parameter {c} leaves no room on the sphere"),
        ));
    }
    let l = k.normalizing_map();
    let kp = k.transform(&l)?;
    let c_cap = -th - 0.05 * (1.0 - th);
    let k0 = half_space_cone(kp.base().n(), c_cap)?.transform(&l.inverse())?;
    if !cone_leq(k, &k0) {
        return Err(Error::construction("A9", "result does not contain K"));
    }
    Ok(k0)
}

/// A subcone `K₀ ⊆ K` every point of which is farther than `τ c_{σ,τ}` from
/// the boundary of `K`, so that the shadow of `C_τ(K₀)` lies in `K`.
///
/// With the apex of `K` at the centre, a point at distance `r` from the
/// centre making angle `θ` with the axis is at distance `d` from the boundary
/// with `sinh d = sinh r · sin(ψ − θ)`. `K₀` has half-angle `ψ₀` and its apex
/// on the axis at distance `D` with `sinh D · sin(ψ − ψ₀)` beyond `sinh c`.
pub fn shrink_across_shells(k: &BallCone, sigma: f64, tau: f64) -> Result<BallCone> {
    check_shells(sigma, tau)?;
    let c = shadow_parameter(sigma, tau);
    if c == 0.0 {
        return Ok(*k);
    }
    let l = k.normalizing_map();
    let kp = k.transform(&l)?;
    let n = *kp.base().n();
    let psi = kp.base().half_angle();
    for i in 1..60 {
        let psi0 = psi / 2f64.powi(i);
        if psi0 <= 1e-6 {
            break;
        }
        let d = (1.01 * c.sinh() / (psi - psi0).sin()).asinh() + 1e-3;
        let h = d.tanh();
        if h >= psi0.cos() || 1.0 - h < 1e-12 {
            continue;
        }
        let Ok(apex) = BallPoint::new(n * h) else {
            continue;
        };
        let cap = Cap::new(SphereDirection::unchecked(n), psi0)?;
        let Ok(k0p) = BallCone::new(apex, cap) else {
            continue;
        };
        let k0 = k0p.transform(&l.inverse())?;
        if cone_leq(&k0, k) {
            return Ok(k0);
        }
    }
    Err(Error::construction(
        "A10",
        format!("no subcone keeps distance {c} from the boundary"),
    ))
}

/// Checks that the distance `τ c_{σ,τ}` neighbourhood of sampled points of
/// `inner` (interior and lateral surface) lies inside `outer`.
///
/// Serves both constructions: `(K, enclose_shadow(K))` and
/// `(shrink_across_shells(K), K)`. Returns the smallest margin seen.
pub fn shadow_certificate<R: Rng + ?Sized>(
    inner: &BallCone,
    outer: &BallCone,
    sigma: f64,
    tau: f64,
    rng: &mut R,
    budget: usize,
) -> Result<f64> {
    check_shells(sigma, tau)?;
    let tol = Tolerances::DEFAULT;
    let c = shadow_parameter(sigma, tau);
    let shell = Hyperboloid::new(tau)?;
    let mut worst = f64::INFINITY;
    for i in 0..budget {
        // the closure's boundary only matters for a positive radius
        let v = if c > 0.0 && i % 2 == 1 {
            cone_lateral(rng, inner)
        } else {
            cone_interior(rng, inner)
        };
        let m = if c > 0.0 {
            hyperball_in_cone_margin(&Hyperball::new(v, tau * c, shell)?, outer)
        } else if outer.contains(v.coords()) {
            outer.depth(v.coords()).max(tol.margin * 2.0)
        } else {
            -1.0
        };
        worst = worst.min(m);
        if m <= tol.margin {
            return Err(Error::construction(
                "shadow",
                format!("shadow of {:?} is not inside (margin {m:e})", v.coords()),
            ));
        }
    }
    Ok(worst)
}
