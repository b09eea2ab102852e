//! Cones under Lorentz transformations and translations.

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::shells::half_space_cone;
use crate::ball_model::{
    cap_image, lift_from_ball, lorentz_ball_action, lorentz_sphere_action, Cap, Hyperboloid,
    SphereDirection,
};
use crate::hypercone::{
    cone_leq, enclose, hyperball_disjoint_margin, hyperball_in_cone_margin, in_causal_completion,
    BallCone, Hyperball, Hypercone, RawCap,
};
use crate::minkowski::{in_closed_light_cone, FourVector, LorentzTransform};
use crate::numeric::{angle_between, fibonacci_sphere};
use crate::sampling::cone_interior;
use crate::{Error, Result, Tolerances};

/// Boosts towards the directions of the closed base cap of `K`, each of
/// which maps `K` into itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractingBoosts {
    pub cone: BallCone,
    /// Sends the apex of `cone` to the centre.
    pub normalizer: LorentzTransform,
}

pub fn contracting_boosts(k: &BallCone) -> ContractingBoosts {
    ContractingBoosts {
        cone: *k,
        normalizer: k.normalizing_map(),
    }
}

impl ContractingBoosts {
    /// The admissible directions: the closed base cap.
    pub fn directions(&self) -> &Cap {
        self.cone.base()
    }

    pub fn admits(&self, l: &SphereDirection) -> bool {
        angle_between(l.vector(), self.cone.base().n()) <= self.cone.base().half_angle() + 1e-12
    }

    /// `L⁻¹ B(Ll, χ) L`; in the frame with the apex at the centre this is the
    /// boost along the image of `l`, whose fixed point `(1, l)` is scaled by `e^χ`.
    pub fn boost(&self, l: &SphereDirection, chi: f64) -> Result<LorentzTransform> {
        if !self.admits(l) {
            return Err(Error::Domain(format!(
                "direction {:?} is outside the base cap",
                l.vector()
            )));
        }
        if !(chi.is_finite() && chi >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "rapidity must be nonnegative, got {chi}"
            )));
        }
        let lp = lorentz_sphere_action(&self.normalizer, l);
        let b = LorentzTransform::boost(lp.vector(), chi)?;
        Ok(self.normalizer.inverse().compose(&b).compose(&self.normalizer))
    }

    /// The image `Λ(l, χ) K`.
    pub fn image(&self, l: &SphereDirection, chi: f64) -> Result<BallCone> {
        self.cone.transform(&self.boost(l, chi)?)
    }
}

/// Smallest `n ≤ nmax` with `Λ_n(l) K` disjoint from `O`.
///
/// Evaluated as `K ∩ Λ_n(l)⁻¹ O = ∅`, which keeps the exact cone and moves
/// only the hyperball.
pub fn escape_ball(k: &BallCone, o: &Hyperball, l: &SphereDirection, nmax: usize) -> Result<usize> {
    let tol = Tolerances::DEFAULT;
    let cb = contracting_boosts(k);
    let mut last = f64::NEG_INFINITY;
    for n in 0..=nmax {
        let b = cb.boost(l, n as f64)?;
        last = hyperball_disjoint_margin(&o.transform(&b.inverse()), k);
        if last > tol.margin {
            return Ok(n);
        }
    }
    Err(Error::construction(
        "A11",
        format!("hyperball still met after {nmax} boosts (margin {last:e})"),
    ))
}

/// The Lorentz maps within spectral-norm distance `radius` of the identity,
/// a generator, or a product of two generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzNeighbourhood {
    pub generators: Vec<LorentzTransform>,
    pub radius: f64,
}

impl LorentzNeighbourhood {
    pub fn new(generators: Vec<LorentzTransform>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "neighbourhood radius must be positive, got {radius}"
            )));
        }
        Ok(Self { generators, radius })
    }

    /// Centres of the neighbourhood: words of length at most two.
    pub fn words(&self) -> Vec<LorentzTransform> {
        let mut out = vec![LorentzTransform::identity()];
        out.extend(self.generators.iter().copied());
        for g in &self.generators {
            for h in &self.generators {
                out.push(g.compose(h));
            }
        }
        out
    }

    pub fn contains(&self, l: &LorentzTransform) -> bool {
        self.words().iter().any(|w| w.distance(l) <= self.radius)
    }
}

/// Bound on how far any point of the closed ball moves, in the Euclidean
/// metric, when `W` is replaced by a map within `eps` of it.
///
/// With `X = (1, v)`, `|X| ≤ √2` and the denominator `(WX)₀` is at least
/// `√(1 + |W₀·|²) − |W₀·|`; the numerator changes by at most `2ε`.
fn displacement_bound(w: &LorentzTransform, eps: f64) -> Option<f64> {
    let m = w.matrix();
    let row = Vector3::new(m[(0, 1)], m[(0, 2)], m[(0, 3)]).norm();
    let floor = (1.0 + row * row).sqrt() - row;
    let den = floor - std::f64::consts::SQRT_2 * eps;
    (den > 0.0).then(|| 2.0 * eps / den)
}

struct Image {
    apex: Vector3<f64>,
    cap: RawCap,
    delta: f64,
}

fn images(k: &BallCone, nbhd: &LorentzNeighbourhood) -> Result<Vec<Image>> {
    nbhd.words()
        .iter()
        .map(|w| {
            let delta = displacement_bound(w, nbhd.radius).ok_or_else(|| {
                Error::NoEnclosure(format!(
                    "radius {} is too large for the projective action",
                    nbhd.radius
                ))
            })?;
            let c = cap_image(w, k.base())?;
            let angle = (c.half_angle().cos() - delta).max(-1.0).acos() + 1e-9;
            Ok(Image {
                apex: *lorentz_ball_action(w, k.apex()).coords(),
                cap: RawCap {
                    axis: *c.n(),
                    angle,
                },
                delta,
            })
        })
        .collect()
}

/// Smallest slack of the sufficient condition for `ΛK ⊆ K₀` over the
/// neighbourhood: every moved cap within the base of `K₀` and every moved
/// apex at depth at least its displacement bound. Both parts of `ΛK` then lie
/// in the convex `K₀`, hence so does their hull.
fn robust_margin(images: &[Image], k0: &BallCone) -> f64 {
    images
        .iter()
        .map(|im| {
            let cap = k0.base().half_angle() - angle_between(k0.base().n(), &im.cap.axis) - im.cap.angle;
            cap.min(k0.depth(&im.apex) - im.delta)
        })
        .fold(f64::INFINITY, f64::min)
}

/// A cone containing `ΛK` for every `Λ` of the neighbourhood.
pub fn robust_enclosure_lorentz(k: &BallCone, nbhd: &LorentzNeighbourhood) -> Result<BallCone> {
    let tol = Tolerances::DEFAULT;
    let ims = images(k, nbhd)?;
    let caps: Vec<RawCap> = ims.iter().map(|im| im.cap).collect();
    let offsets = fibonacci_sphere(32);
    let mut best = f64::NEG_INFINITY;
    for factor in [1.25, 1.5, 2.0, 3.0] {
        let mut points = Vec::with_capacity(ims.len() * 33);
        for im in &ims {
            points.push(im.apex);
            points.extend(offsets.iter().map(|d| im.apex + d * (im.delta * factor)));
        }
        let Some(k0) = enclose(&caps, &points, &tol) else {
            continue;
        };
        let m = robust_margin(&ims, &k0);
        best = best.max(m);
        if m > 0.0 {
            return Ok(k0);
        }
    }
    Err(Error::NoEnclosure(format!(
        "no cone covers the neighbourhood images (best slack {best:e})"
    )))
}

/// `v(u) = τ(1 − u²)/2u`.
pub fn v_of_u(u: f64, tau: f64) -> f64 {
    tau * (1.0 - u * u) / (2.0 * u)
}

/// The point `a(u) = (uτ + v(u), v(u) l)` of the generator ray in direction `l`.
pub fn a_of_u(u: f64, tau: f64, l: &Vector3<f64>) -> FourVector {
    let v = v_of_u(u, tau);
    FourVector::from_parts(u * tau + v, l * v)
}

/// `(a(u) + t − a'(u'))²` evaluated directly, with `t = (t, 0)`.
pub fn interval_direct(
    u: f64,
    up: f64,
    l: &Vector3<f64>,
    lp: &Vector3<f64>,
    tau: f64,
    t: f64,
) -> f64 {
    (a_of_u(u, tau, l) + FourVector::new(t, 0.0, 0.0, 0.0) - a_of_u(up, tau, lp)).square()
}

/// The expanded form
/// `t² + 2τ² + 2t(uτ + v) − 2(t + uτ + v)(u'τ + v') + 2vv' l·l'`.
pub fn interval_five_term(
    u: f64,
    up: f64,
    l: &Vector3<f64>,
    lp: &Vector3<f64>,
    tau: f64,
    t: f64,
) -> f64 {
    let (v, vp) = (v_of_u(u, tau), v_of_u(up, tau));
    t * t + 2.0 * tau * tau + 2.0 * t * (u * tau + v) - 2.0 * (t + u * tau + v) * (up * tau + vp)
        + 2.0 * v * vp * l.dot(lp)
}

/// `u'τ + v(u') > τ + t`, under which `a(u) + t` and `a'(u')` are spacelike
/// separated whenever `l·l' < 0`.
pub fn spacelike_criterion(up: f64, tau: f64, t: f64) -> bool {
    up * tau + v_of_u(up, tau) > tau + t
}

const RHO_MAX: f64 = 40.0;
const RHO_STEP: f64 = 0.05;

/// Whether every shadow of the time-translated cone (apex at the centre,
/// half-angle `psi`, translation `T`) clears the plane `n·x = c`.
///
/// The shell point at distance `ρ` on a generator moves to
/// `(τ cosh ρ + T, τ sinh ρ l)`, whose ball point has norm `v`, proper time
/// `σ` and shadow radius `ln(σ/τ)`; the distance to the plane is bounded
/// below through `sinh d = (n·x − c)/(√(1 − |x|²) √(1 − c²))`.
fn translated_shadows_clear(psi: f64, tau: f64, big_t: f64, c: f64) -> bool {
    let cp = psi.cos();
    let sc = (1.0 - c * c).sqrt();
    if tau * (cp - c) / (big_t * sc) < 1.01 {
        return false;
    }
    let steps = (RHO_MAX / RHO_STEP) as usize;
    (0..=steps).all(|i| {
        let rho = i as f64 * RHO_STEP;
        let den = tau * rho.cosh() + big_t;
        let v = tau * rho.sinh() / den;
        let one_minus_v = (tau * (-rho).exp() + big_t) / den;
        let sv = (one_minus_v * (1.0 + v)).sqrt();
        let sigma2 = tau * tau + 2.0 * tau * big_t * rho.cosh() + big_t * big_t;
        let r = 0.5 * (sigma2 / (tau * tau)).ln();
        (v * cp - c) / (sv * sc) > r.sinh()
    })
}

/// A cone `K₀` with `C(K) + t ⊆ C(K₀)` for every given translation.
///
/// After moving the apex to the centre the translations are dominated by one
/// time translation `T`; the shadows of the translated cone then stay beyond
/// a plane `n·x = c` and the cone over the lens beyond a slightly lower plane
/// is returned, mapped back.
pub fn translate_enclosure(
    k: &BallCone,
    tau: f64,
    translations: &[FourVector],
) -> Result<BallCone> {
    let tol = Tolerances::DEFAULT;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    for t in translations {
        if !t.is_finite() || !in_closed_light_cone(t, tol.linear) {
            return Err(Error::Domain(format!(
                "translation {t} is not in the closed forward light cone"
            )));
        }
    }
    let l = k.normalizing_map();
    let big_t = translations
        .iter()
        .map(|t| {
            let m = l.apply(t);
            m.x0 + m.spatial_norm()
        })
        .fold(0.0, f64::max);
    if big_t == 0.0 {
        return Ok(*k);
    }
    let kp = k.transform(&l)?;
    let psi = kp.base().half_angle();
    let (mut lo, mut hi) = (-1.0 + 1e-12, 0.0);
    if !translated_shadows_clear(psi, tau, big_t, lo) {
        return Err(Error::construction(
            "A13",
            format!("translation of size {big_t} is too large to enclose"),
        ));
    }
    if translated_shadows_clear(psi, tau, big_t, hi) {
        lo = hi;
    } else {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if translated_shadows_clear(psi, tau, big_t, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let c = lo - 0.01 * (1.0 + lo);
    let k0 = half_space_cone(kp.base().n(), c)?.transform(&l.inverse())?;
    if !cone_leq(k, &k0) {
        return Err(Error::construction("A13", "result does not contain K"));
    }
    Ok(k0)
}

/// Samples events of `C(K)` and checks that each translate lies in `C(K₀)`.
///
/// Events are taken on the shell and, where their shadow fits in `K`, on
/// nearby shells `σ = τ e^{±s}`.
pub fn translation_certificate<R: Rng + ?Sized>(
    k: &BallCone,
    k0: &BallCone,
    tau: f64,
    translations: &[FourVector],
    rng: &mut R,
    budget: usize,
) -> Result<()> {
    let shell = Hyperboloid::new(tau)?;
    let target = Hypercone::new(shell, *k0);
    for i in 0..budget {
        let u = cone_interior(rng, k);
        let base = lift_from_ball(&u, &shell);
        let x = if i % 2 == 1 {
            let s: f64 = rng.random_range(-0.5..0.5);
            let fits = s != 0.0
                && hyperball_in_cone_margin(&Hyperball::new(u, tau * s.abs(), shell)?, k) > 0.0;
            if fits {
                s.exp() * base
            } else {
                base
            }
        } else {
            base
        };
        for t in translations {
            let y = x + *t;
            match in_causal_completion(&y, &target) {
                Ok(true) => {}
                Ok(false) => {
                    return Err(Error::construction(
                        "A13",
                        format!("translate {y} of a sampled event is outside C(K0)"),
                    ))
                }
                Err(e) => {
                    return Err(Error::construction(
                        "A13",
                        format!("translate {y} of a sampled event is undecided: {e}"),
                    ))
                }
            }
        }
    }
    Ok(())
}
