//! Constructive witnesses for the topological facts about hypercones.
//!
//! Every construction returns an object that has been re-checked with the
//! predicates of [`crate::hypercone`]; when a check fails after the allotted
//! refinement rounds the construction reports `ConstructionFailure` instead
//! of returning an unverified witness.
//!
//! | function | statement realised |
//! |---|---|
//! | [`funnel_in`] | a decreasing sequence inside `K` escaping every hyperball |
//! | [`funnel_from_exhaustion`] | opposites of an exhaustion form a funnel |
//! | [`avoid_ball_inside`] | a subcone of `K` missing a hyperball |
//! | [`wrap_ball_in_complement`] | a cone around a hyperball, disjoint from `K` |
//! | [`path_connect`] | interpolating paths between any two cones |
//! | [`path_connect_in_complement`] | the same inside the complement of `K` |
//! | [`shrink_for_connectivity`] | a subcone making two complements path connected |
//! | [`common_complement_cone`] | a cone disjoint from two disjoint cones |
//! | [`enclose_shadow`] | a cone on another shell containing the causal shadow |
//! | [`shrink_across_shells`] | a cone whose shadow stays inside `K` |
//! | [`contracting_boosts`], [`escape_ball`] | boosts mapping `K` into itself |
//! | [`robust_enclosure_lorentz`] | a cone containing `ΛK` for `Λ` near given maps |
//! | [`translate_enclosure`] | a cone containing the translates of `C(K)` |

mod funnels;
mod paths;
mod shells;
mod transforms;

pub use funnels::{avoid_ball_inside, funnel_from_exhaustion, funnel_in, wrap_ball_in_complement, Funnel};
pub use paths::{
    common_complement_cone, path_connect, path_connect_avoiding, path_connect_in_complement,
    shrink_for_connectivity, ConePath, ShrinkCase, ShrinkResult,
};
pub use shells::{enclose_shadow, shadow_certificate, shrink_across_shells};
pub use transforms::{
    contracting_boosts, escape_ball, interval_direct, interval_five_term, robust_enclosure_lorentz,
    spacelike_criterion, translate_enclosure, translation_certificate, v_of_u, a_of_u,
    ContractingBoosts, LorentzNeighbourhood,
};

use nalgebra::Vector3;

use crate::ball_model::{BallPoint, Cap, SphereDirection};
use crate::hypercone::{cone_leq, BallCone};
use crate::numeric::{angle_between, rotate_towards};

/// Thin cone with cap `(m, eps)` and apex `h·m` on the cap's own axis.
pub(crate) fn needle(m: &Vector3<f64>, eps: f64, h: f64) -> Option<BallCone> {
    let apex = BallPoint::new(m * h).ok()?;
    let cap = Cap::new(SphereDirection::unchecked(*m), eps).ok()?;
    BallCone::new(apex, cap).ok()
}

/// Searches needles around `m`, pushing the apex towards the sphere and then
/// narrowing the cap, until `accept` holds.
pub(crate) fn find_needle(
    m: &Vector3<f64>,
    eps0: f64,
    accept: impl Fn(&BallCone) -> bool,
) -> Option<BallCone> {
    let mut eps = eps0;
    for _ in 0..24 {
        if eps <= 2e-6 {
            break;
        }
        let ce = eps.cos();
        for k in 0..48 {
            let h = ce - (1.0 - ce) * 0.5f64.powi(k);
            if let Some(n) = needle(m, eps, h) {
                if accept(&n) {
                    return Some(n);
                }
            }
        }
        eps *= 0.5;
    }
    None
}

/// A needle inside both cones, located in the overlap of their caps.
pub(crate) fn needle_in_both(k1: &BallCone, k2: &BallCone) -> Option<BallCone> {
    let (n1, n2) = (k1.base().n(), k2.base().n());
    let (p1, p2) = (k1.base().half_angle(), k2.base().half_angle());
    let gamma = angle_between(n1, n2);
    let lo = (-p1).max(gamma - p2);
    let hi = p1.min(gamma + p2);
    if hi - lo <= 4e-6 {
        return None;
    }
    let m = rotate_towards(n1, n2, 0.5 * (lo + hi));
    let eps0 = (0.45 * (hi - lo)).min(0.3);
    find_needle(&m, eps0, |n| cone_leq(n, k1) && cone_leq(n, k2))
}
