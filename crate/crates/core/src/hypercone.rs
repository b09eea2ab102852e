//! Cones over spherical caps in the Beltrami–Klein ball, hyperballs, and the
//! order and separation predicates between them.
//!
//! A [`BallCone`] with apex `a` and cap `(n, ψ)` is the union of the open
//! segments from `a` to the points of the open cap on the unit sphere, i.e.
//! the interior of the convex hull of `a` and the lens cut from the ball by
//! the plane `n·x = cos ψ`. It is pointed when `a` lies strictly on the far
//! side of that plane. Its causal completion in the light cone is a hypercone.
//!
//! Predicates report margins. A margin inside the degeneracy window
//! (`Tolerances::margin`) is an error, never a guess.

use std::f64::consts::PI;

use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::ball_model::{
    cap_image, fit_cap, homology_through, lorentz_ball_action, shadow_radius, BallPoint, Cap,
    Hyperboloid, SphereDirection,
};
use crate::minkowski::{causal_class, in_light_cone, CausalClass, FourVector, LorentzTransform};
use crate::numeric::{angle_between, nelder_mead_max, periodic_min, rotate_towards};
use crate::support::{gjk, Convex};
use crate::{Error, Result, Tolerances};

/// Samples used for the coarse scan around the rim circle.
const RIM_SCAN: usize = 64;

/// A pointed open convex cone in the ball with a spherical-cap base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConeRepr", into = "ConeRepr")]
pub struct BallCone {
    apex: BallPoint,
    base: Cap,
}

#[derive(Serialize, Deserialize)]
struct ConeRepr {
    apex: BallPoint,
    base: Cap,
}

impl TryFrom<ConeRepr> for BallCone {
    type Error = Error;
    fn try_from(r: ConeRepr) -> Result<Self> {
        BallCone::new(r.apex, r.base)
    }
}

impl From<BallCone> for ConeRepr {
    fn from(k: BallCone) -> Self {
        ConeRepr {
            apex: k.apex,
            base: k.base,
        }
    }
}

impl BallCone {
    pub fn new(apex: BallPoint, base: Cap) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        if base.half_angle() <= tol.min_half_angle {
            return Err(Error::InvalidInput(format!(
                "cone half-angle {} is below {}",
                base.half_angle(),
                tol.min_half_angle
            )));
        }
        let k = Self { apex, base };
        if k.pointedness() <= tol.pointed {
            return Err(Error::InvalidInput(format!(
                "cone is not pointed: apex lies {:e} from the far side of its base plane",
                k.pointedness()
            )));
        }
        Ok(k)
    }

    /// Convenience constructor from raw coordinates and an angle in degrees.
    pub fn from_parts(apex: [f64; 3], axis: [f64; 3], half_angle_deg: f64) -> Result<Self> {
        let apex = BallPoint::try_from(apex)?;
        let base = Cap::from_degrees(Vector3::from(axis), half_angle_deg)?;
        BallCone::new(apex, base)
    }

    pub fn apex(&self) -> &BallPoint {
        &self.apex
    }

    pub fn base(&self) -> &Cap {
        &self.base
    }

    fn a(&self) -> &Vector3<f64> {
        self.apex.coords()
    }

    fn n(&self) -> &Vector3<f64> {
        self.base.n()
    }

    /// Signed distance of the apex behind the base plane, `cos ψ − n·a`.
    pub fn pointedness(&self) -> f64 {
        self.base.half_angle().cos() - self.n().dot(self.a())
    }

    /// End point on the rim circle of the generator at polar angle `theta`.
    pub fn rim_point(&self, theta: f64) -> Vector3<f64> {
        self.base.boundary_point(theta)
    }

    /// Strict membership of a point of ℝ³.
    pub fn contains(&self, x: &Vector3<f64>) -> bool {
        if x.norm_squared() >= 1.0 {
            return false;
        }
        let n = self.n();
        let d = x - self.a();
        let nd = n.dot(&d);
        if nd <= 0.0 {
            return false;
        }
        let (s, c) = self.base.half_angle().sin_cos();
        let t = (c - n.dot(self.a())) / nd;
        let hit = self.a() + d * t;
        (hit - n * c).norm() < s
    }

    fn segment_distance(&self, x: &Vector3<f64>, theta: f64) -> f64 {
        let a = self.a();
        let d = self.rim_point(theta) - a;
        let t = ((x - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
        (x - (a + d * t)).norm()
    }

    /// Euclidean distance to the lateral surface.
    pub fn lateral_distance(&self, x: &Vector3<f64>) -> f64 {
        periodic_min(|t| self.segment_distance(x, t), RIM_SCAN).1
    }

    /// Signed Euclidean depth: distance to the boundary inside, negative outside.
    pub fn depth(&self, x: &Vector3<f64>) -> f64 {
        let lat = self.lateral_distance(x);
        if self.contains(x) {
            lat.min(1.0 - x.norm())
        } else if x.norm() > 1.0 {
            -lat.min(x.norm() - 1.0)
        } else {
            -lat
        }
    }

    /// A canonical interior point, halfway from the apex to the cap centre.
    pub fn interior_point(&self) -> BallPoint {
        BallPoint::clamped(self.a() + (self.n() - self.a()) * 0.5)
    }

    /// Image under a Lorentz map (apex by the ball action, cap by the sphere action).
    pub fn transform(&self, l: &LorentzTransform) -> Result<BallCone> {
        let apex = lorentz_ball_action(l, &self.apex);
        let base = cap_image(l, &self.base)?;
        BallCone::new(apex, base)
    }

    /// The map sending the apex to the centre of the ball.
    pub fn normalizing_map(&self) -> LorentzTransform {
        centering_boost(&self.apex)
    }

    /// Union of the rays opposite to the cone's rays through the apex.
    pub fn opposite(&self) -> Result<BallCone> {
        let mapped: Vec<Vector3<f64>> = self
            .base
            .boundary_samples(16)
            .iter()
            .map(|p| *homology_through(&self.apex, &SphereDirection::unchecked(*p)).vector())
            .collect();
        let hint = homology_through(&self.apex, self.base.axis());
        let base = fit_cap(&mapped, hint.vector())?;
        BallCone::new(self.apex, base)
    }
}

impl Convex for BallCone {
    fn support_point(&self, w: &Vector3<f64>) -> Vector3<f64> {
        let wn = w.norm();
        if wn == 0.0 {
            return *self.a();
        }
        let u = w / wn;
        let n = self.n();
        let (s, c) = self.base.half_angle().sin_cos();
        let lens = if n.dot(&u) >= c {
            u
        } else {
            let perp = u - n * n.dot(&u);
            let dir = if perp.norm() < 1e-15 {
                crate::numeric::orthonormal_frame(n).0
            } else {
                perp.normalize()
            };
            n * c + dir * s
        };
        if w.dot(&lens) >= w.dot(self.a()) {
            lens
        } else {
            *self.a()
        }
    }

    fn any_point(&self) -> Vector3<f64> {
        *self.interior_point().coords()
    }
}

/// A closed hyperbolic ball on a time-shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperball {
    pub center: BallPoint,
    pub radius: f64,
    pub shell: Hyperboloid,
}

impl Hyperball {
    pub fn new(center: BallPoint, radius: f64, shell: Hyperboloid) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "hyperball radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            center,
            radius,
            shell,
        })
    }

    /// Euclidean radius of the same ball when centred at the origin.
    pub fn centered_euclidean_radius(&self) -> f64 {
        (self.radius / self.shell.tau()).tanh()
    }

    /// Lorentz maps act isometrically, so only the centre moves.
    pub fn transform(&self, l: &LorentzTransform) -> Hyperball {
        Hyperball {
            center: lorentz_ball_action(l, &self.center),
            ..*self
        }
    }
}

/// Causal completion of a ball-model cone on a time-shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypercone {
    pub shell: Hyperboloid,
    pub cone: BallCone,
}

impl Hypercone {
    pub fn new(shell: Hyperboloid, cone: BallCone) -> Self {
        Self { shell, cone }
    }

    pub fn contains_event(&self, x: &FourVector) -> Result<bool> {
        in_causal_completion(x, self)
    }
}

/// The pure boost sending `a` to the centre of the ball.
pub fn centering_boost(a: &BallPoint) -> LorentzTransform {
    let r = a.coords().norm();
    if r == 0.0 {
        return LorentzTransform::identity();
    }
    LorentzTransform::boost(&(a.coords() / r), -r.atanh())
        .expect("unit direction and finite rapidity")
}

pub fn contains_point(k: &BallCone, u: &BallPoint) -> bool {
    k.contains(u.coords())
}

/// Margin of `closure(K1) ⊆ closure(K2)`: the smaller of the apex depth of
/// `K1` in `K2` and the angular slack of the cap inclusion. Nonnegative iff
/// the inclusion holds.
pub fn cone_leq_margin(k1: &BallCone, k2: &BallCone) -> f64 {
    let gamma = angle_between(k1.n(), k2.n());
    let cap_slack = k2.base.half_angle() - k1.base.half_angle() - gamma;
    if k1.a() == k2.a() {
        return cap_slack;
    }
    cap_slack.min(k2.depth(k1.a()))
}

/// `closure(K1) ⊆ closure(K2)` within the margin tolerance.
pub fn cone_leq(k1: &BallCone, k2: &BallCone) -> bool {
    cone_leq_with(k1, k2, &Tolerances::DEFAULT)
}

pub fn cone_leq_with(k1: &BallCone, k2: &BallCone, tol: &Tolerances) -> bool {
    cone_leq_margin(k1, k2) >= -tol.margin
}

/// Plane `{x : normal·x = offset}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub normal: Vector3<f64>,
    pub offset: f64,
}

impl Plane {
    pub fn signed_distance(&self, x: &Vector3<f64>) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

/// Outcome of a separation query between two open cones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Disjointness {
    /// The first cone lies in `normal·x < offset`, the second in `normal·x > offset`.
    /// For cones sharing their apex the plane passes through it and the margin
    /// is the angular gap between the caps seen from the apex.
    Disjoint { plane: Plane, margin: f64 },
    /// `point` lies in both cones, at least `margin` from both boundaries
    /// (angular for a shared apex, Euclidean otherwise).
    Intersecting { point: BallPoint, margin: f64 },
}

impl Disjointness {
    pub fn is_disjoint(&self) -> bool {
        matches!(self, Disjointness::Disjoint { .. })
    }

    pub fn margin(&self) -> f64 {
        match self {
            Disjointness::Disjoint { margin, .. } | Disjointness::Intersecting { margin, .. } => {
                *margin
            }
        }
    }
}

pub fn disjoint(k1: &BallCone, k2: &BallCone) -> Result<Disjointness> {
    disjoint_with(k1, k2, &Tolerances::DEFAULT)
}

pub fn disjoint_with(k1: &BallCone, k2: &BallCone, tol: &Tolerances) -> Result<Disjointness> {
    if (k1.a() - k2.a()).norm() <= tol.linear {
        return disjoint_same_apex(k1, k2, tol);
    }
    let g = gjk(k1, k2);
    let mut gap = f64::NEG_INFINITY;
    if g.distance > 0.0 {
        let n = (g.b - g.a) / g.distance;
        let hi1 = k1.support_value(&n);
        let lo2 = -k2.support_value(&-n);
        gap = lo2 - hi1;
        if gap > tol.margin {
            return Ok(Disjointness::Disjoint {
                plane: Plane {
                    normal: n,
                    offset: 0.5 * (hi1 + lo2),
                },
                margin: gap,
            });
        }
    }
    let (point, depth) = common_depth(k1, k2, &[(g.a + g.b) * 0.5]);
    if depth > tol.margin {
        return Ok(Disjointness::Intersecting {
            point: BallPoint::clamped(point),
            margin: depth,
        });
    }
    Err(Error::Degenerate {
        predicate: "disjoint",
        margin: gap.max(depth),
        tolerance: tol.margin,
    })
}

/// Deepest point found of `K1 ∩ K2`, by direct evaluation of a few seeds and
/// then a simplex search.
fn common_depth(k1: &BallCone, k2: &BallCone, extra: &[Vector3<f64>]) -> (Vector3<f64>, f64) {
    let f = |x: &Vector3<f64>| k1.depth(x).min(k2.depth(x));
    let p1 = *k1.interior_point().coords();
    let p2 = *k2.interior_point().coords();
    let mut seeds: Vec<Vector3<f64>> = extra.to_vec();
    seeds.extend([p1, p2, (p1 + p2) * 0.5]);
    let mut scored: Vec<(Vector3<f64>, f64)> = seeds.iter().map(|s| (*s, f(s))).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    if scored[0].1 > 1e-6 {
        return scored[0];
    }
    let mut best = scored[0];
    for (s, _) in scored.iter().take(3) {
        let r = nelder_mead_max(f, *s, 0.05, 300);
        if r.1 > best.1 {
            best = r;
        }
    }
    best
}

fn disjoint_same_apex(k1: &BallCone, k2: &BallCone, tol: &Tolerances) -> Result<Disjointness> {
    let l = k1.normalizing_map();
    let c1 = cap_image(&l, &k1.base)?;
    let c2 = cap_image(&l, &k2.base)?;
    let (n1, n2) = (c1.n(), c2.n());
    let (p1, p2) = (c1.half_angle(), c2.half_angle());
    let gamma = angle_between(n1, n2);
    let gap = gamma - p1 - p2;
    if gap > tol.margin {
        // plane through the apex tangent-between the two caps
        let lo = p1.max(gamma - PI + p2);
        let hi = (PI - p1).min(gamma - p2);
        let phi = 0.5 * (lo + hi);
        let t = rotate_towards(n1, n2, PI / 2.0);
        let w = -n1 * phi.sin() + t * phi.cos();
        let f = l.matrix().transpose() * Vector4::new(0.0, w.x, w.y, w.z);
        let fs = Vector3::new(f[1], f[2], f[3]);
        let norm = fs.norm();
        return Ok(Disjointness::Disjoint {
            plane: Plane {
                normal: fs / norm,
                offset: -f[0] / norm,
            },
            margin: gap,
        });
    }
    if gap < -tol.margin {
        let lo = (-p1).max(gamma - p2);
        let hi = p1.min(gamma + p2);
        let half_width = 0.5 * (hi - lo);
        if half_width > tol.margin {
            let m = rotate_towards(n1, n2, 0.5 * (lo + hi));
            let inv = l.inverse();
            let point = lorentz_ball_action(&inv, &BallPoint::clamped(m * 0.5));
            return Ok(Disjointness::Intersecting {
                point,
                margin: half_width,
            });
        }
    }
    Err(Error::Degenerate {
        predicate: "disjoint",
        margin: gap,
        tolerance: tol.margin,
    })
}

pub fn opposite(k: &BallCone) -> Result<BallCone> {
    k.opposite()
}

/// A cap as raw axis and angle; the angle may exceed π while merging.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawCap {
    pub axis: Vector3<f64>,
    pub angle: f64,
}

impl From<&Cap> for RawCap {
    fn from(c: &Cap) -> Self {
        RawCap {
            axis: *c.n(),
            angle: c.half_angle(),
        }
    }
}

/// A cap containing both arguments; the minimal one for two caps.
pub(crate) fn merge_caps(c1: RawCap, c2: RawCap) -> RawCap {
    let gamma = angle_between(&c1.axis, &c2.axis);
    if gamma + c2.angle <= c1.angle {
        return c1;
    }
    if gamma + c1.angle <= c2.angle {
        return c2;
    }
    let angle = 0.5 * (gamma + c1.angle + c2.angle);
    RawCap {
        axis: rotate_towards(&c1.axis, &c2.axis, angle - c1.angle),
        angle,
    }
}

pub(crate) fn cover_caps(caps: &[RawCap]) -> Option<RawCap> {
    let mut it = caps.iter().copied();
    let first = it.next()?;
    Some(it.fold(first, merge_caps))
}

/// Where the ray from `e` through `p` leaves the unit ball.
pub(crate) fn ray_exit(e: &Vector3<f64>, p: &Vector3<f64>) -> Option<Vector3<f64>> {
    let d = p - e;
    let dd = d.norm_squared();
    if dd < 1e-30 {
        return None;
    }
    let ed = e.dot(&d);
    let t = (-ed + (ed * ed + dd * (1.0 - e.norm_squared())).sqrt()) / dd;
    Some((e + d * t).normalize())
}

/// Angular slack added to every cap and shadow point while enclosing.
const ENCLOSE_SLACK: f64 = 1e-7;

/// A cone whose cap contains every cap in `caps` and whose closure contains
/// every point of `points` in its interior.
///
/// The apex is placed on the ray opposite the covering cap's axis; each point
/// is then covered by adding its shadow on the sphere seen from the apex.
pub(crate) fn enclose(caps: &[RawCap], points: &[Vector3<f64>], tol: &Tolerances) -> Option<BallCone> {
    let inflated: Vec<RawCap> = caps
        .iter()
        .map(|c| RawCap {
            axis: c.axis,
            angle: c.angle + ENCLOSE_SLACK,
        })
        .collect();
    let base = cover_caps(&inflated)?;
    if base.angle >= PI - tol.cap_gap {
        return None;
    }
    let r_min = (-base.angle.cos()).max(0.0);
    let fractions: &[f64] = if r_min == 0.0 {
        &[1.0, 0.75, 0.5, 0.25, 0.1, 0.03, 0.01, 3e-3, 1e-3]
    } else {
        &[0.75, 0.5, 0.25, 0.1, 0.03, 0.01, 3e-3, 1e-3]
    };
    for &s in fractions {
        let r = 1.0 - (1.0 - r_min) * s;
        let e = -base.axis * r;
        let mut all = inflated.clone();
        for p in points {
            if let Some(q) = ray_exit(&e, p) {
                all.push(RawCap {
                    axis: q,
                    angle: ENCLOSE_SLACK,
                });
            }
        }
        let Some(cover) = cover_caps(&all) else {
            continue;
        };
        if cover.angle >= PI - tol.cap_gap {
            continue;
        }
        if cover.axis.dot(&e) >= cover.angle.cos() - 10.0 * tol.pointed {
            continue;
        }
        let Ok(apex) = BallPoint::new(e) else {
            continue;
        };
        let Ok(cap) = Cap::new(SphereDirection::unchecked(cover.axis), cover.angle) else {
            continue;
        };
        if let Ok(k) = BallCone::new(apex, cap) {
            return Some(k);
        }
    }
    None
}

/// A cone containing both arguments, if the family has one.
pub fn enclosing_cone(k1: &BallCone, k2: &BallCone) -> Option<BallCone> {
    enclosing_cone_with(k1, k2, &Tolerances::DEFAULT)
}

pub fn enclosing_cone_with(k1: &BallCone, k2: &BallCone, tol: &Tolerances) -> Option<BallCone> {
    if cone_leq_with(k1, k2, tol) {
        return Some(*k2);
    }
    if cone_leq_with(k2, k1, tol) {
        return Some(*k1);
    }
    let e = enclose(
        &[RawCap::from(&k1.base), RawCap::from(&k2.base)],
        &[*k1.a(), *k2.a()],
        tol,
    )?;
    (cone_leq_with(k1, &e, tol) && cone_leq_with(k2, &e, tol)).then_some(e)
}

fn unit_lift(u: &Vector3<f64>) -> FourVector {
    let g = 1.0 / (1.0 - u.norm_squared()).sqrt();
    FourVector::from_parts(g, u * g)
}

/// `cosh` of the unit-shell distance from `p` to the generator ray from `a`
/// towards the ideal point `l`.
fn cosh_ray_distance(p: &FourVector, a: &FourVector, l: &Vector3<f64>) -> f64 {
    let lv = FourVector::from_parts(1.0, *l);
    let k = a.dot(&lv);
    let alpha = p.dot(a);
    let beta = p.dot(&lv);
    if k * alpha > beta {
        (beta * (2.0 * k * alpha - beta)).sqrt() / k
    } else {
        alpha
    }
}

/// Hyperbolic distance from `u` to the lateral surface of `K` on the shell.
pub fn generator_distance(k: &BallCone, u: &BallPoint, shell: &Hyperboloid) -> f64 {
    let p = unit_lift(u.coords());
    let a = unit_lift(k.a());
    let (_, ch) = periodic_min(|t| cosh_ray_distance(&p, &a, &k.rim_point(t)), RIM_SCAN);
    shell.tau() * ch.max(1.0).acosh()
}

/// Margin of `O ⊂ K`: distance from the centre to `∂K` minus the radius,
/// negative when the centre is outside.
pub fn hyperball_in_cone_margin(o: &Hyperball, k: &BallCone) -> f64 {
    let d = generator_distance(k, &o.center, &o.shell);
    if k.contains(o.center.coords()) {
        d - o.radius
    } else {
        -(d + o.radius)
    }
}

/// Margin of `O ∩ K = ∅`, analogous to [`hyperball_in_cone_margin`].
pub fn hyperball_disjoint_margin(o: &Hyperball, k: &BallCone) -> f64 {
    let d = generator_distance(k, &o.center, &o.shell);
    if k.contains(o.center.coords()) {
        -(d + o.radius)
    } else {
        d - o.radius
    }
}

fn decide(predicate: &'static str, margin: f64, tol: &Tolerances) -> Result<bool> {
    if margin.abs() <= tol.margin {
        return Err(Error::Degenerate {
            predicate,
            margin,
            tolerance: tol.margin,
        });
    }
    Ok(margin > 0.0)
}

/// Closed hyperball inside the open cone.
pub fn hyperball_in_cone(o: &Hyperball, k: &BallCone) -> Result<bool> {
    decide("hyperball_in_cone", hyperball_in_cone_margin(o, k), &Tolerances::DEFAULT)
}

/// Closed hyperball disjoint from the open cone.
pub fn hyperball_disjoint_from_cone(o: &Hyperball, k: &BallCone) -> Result<bool> {
    decide(
        "hyperball_disjoint_from_cone",
        hyperball_disjoint_margin(o, k),
        &Tolerances::DEFAULT,
    )
}

/// Whether the event `x ∈ V` lies in the causal completion of `C`: its causal
/// shadow on the shell must fit inside the cone.
pub fn in_causal_completion(x: &FourVector, c: &Hypercone) -> Result<bool> {
    if !in_light_cone(x) {
        return Err(Error::InvalidInput(format!(
            "event {x} is not in the open forward light cone"
        )));
    }
    if causal_class(x) == CausalClass::LightlikeFuture {
        return Ok(false);
    }
    let sigma = x.square().sqrt();
    let u = BallPoint::clamped(x.xs / x.x0);
    let r = shadow_radius(sigma, c.shell.tau())?;
    if r == 0.0 {
        return Ok(c.cone.contains(u.coords()));
    }
    hyperball_in_cone(&Hyperball::new(u, r, c.shell)?, &c.cone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball_model::ball_distance;

    fn cone(apex: [f64; 3], axis: [f64; 3], deg: f64) -> BallCone {
        BallCone::from_parts(apex, axis, deg).unwrap()
    }

    fn bp(x: f64, y: f64, z: f64) -> BallPoint {
        BallPoint::new(Vector3::new(x, y, z)).unwrap()
    }

    #[test]
    fn membership() {
        let k = cone([0.0; 3], [0.0, 0.0, 1.0], 30.0);
        assert!(contains_point(&k, &bp(0.0, 0.0, 0.5)));
        assert!(!contains_point(&k, &bp(0.0, 0.0, -0.5)));
        assert!(!contains_point(&k, &BallPoint::origin()));
        // ray-cast by hand: direction (0.2, 0, 0.3) makes 33.7° with +z
        assert!(!contains_point(&k, &bp(0.2, 0.0, 0.3)));
        assert!(contains_point(&k, &bp(0.1, 0.0, 0.3)));
    }

    #[test]
    fn rejects_unpointed() {
        assert!(BallCone::from_parts([0.0, 0.0, 0.9], [0.0, 0.0, 1.0], 30.0).is_err());
        assert!(BallCone::from_parts([0.0; 3], [0.0, 0.0, 1.0], 90.0).is_err());
        assert!(BallCone::from_parts([0.0, 0.0, -0.5], [0.0, 0.0, 1.0], 100.0).is_ok());
    }

    #[test]
    fn order_examples() {
        let k10 = cone([0.0; 3], [0.0, 0.0, 1.0], 10.0);
        let k30 = cone([0.0; 3], [0.0, 0.0, 1.0], 30.0);
        assert!(cone_leq(&k10, &k10));
        assert!(cone_leq(&k10, &k30));
        assert!(!cone_leq(&k30, &k10));
        let lower = cone([0.0, 0.0, -0.3], [0.0, 0.0, 1.0], 30.0);
        assert!(cone_leq(&k30, &lower));
        assert!(!cone_leq(&lower, &k30));
    }

    #[test]
    fn mirrored_cones_are_disjoint() {
        let up = cone([0.0; 3], [0.0, 0.0, 1.0], 10.0);
        let down = cone([0.0; 3], [0.0, 0.0, -1.0], 10.0);
        match disjoint(&up, &down).unwrap() {
            Disjointness::Disjoint { plane, margin } => {
                assert!((plane.normal + Vector3::z()).norm() < 1e-12);
                assert!(plane.offset.abs() < 1e-12);
                assert!((margin - (PI - 2.0 * 10f64.to_radians())).abs() < 1e-9);
            }
            other => panic!("expected disjoint, got {other:?}"),
        }
    }

    #[test]
    fn identical_cones_intersect() {
        let k = cone([0.1, 0.0, -0.2], [0.0, 1.0, 0.0], 25.0);
        match disjoint(&k, &k).unwrap() {
            Disjointness::Intersecting { point, .. } => assert!(contains_point(&k, &point)),
            other => panic!("expected intersection, got {other:?}"),
        }
    }

    #[test]
    fn separated_apexes() {
        let k1 = cone([0.0, 0.0, 0.3], [0.0, 0.0, 1.0], 20.0);
        let k2 = cone([0.0, 0.0, -0.3], [0.0, 0.0, -1.0], 20.0);
        let d = disjoint(&k1, &k2).unwrap();
        let Disjointness::Disjoint { plane, margin } = d else {
            panic!("expected disjoint")
        };
        assert!((margin - 0.6).abs() < 1e-6);
        assert!(plane.signed_distance(&Vector3::new(0.0, 0.0, 0.5)) < 0.0);

        let k3 = cone([0.0, 0.0, -0.3], [0.0, 0.0, 1.0], 20.0);
        assert!(!disjoint(&k1, &k3).unwrap().is_disjoint());
    }

    #[test]
    fn touching_cones_are_degenerate() {
        // the second apex lies on the lateral surface of the first
        let k1 = cone([0.0; 3], [0.0, 0.0, 1.0], 45.0);
        let p = Vector3::new(0.3, 0.0, 0.3);
        let k2 = BallCone::new(
            BallPoint::new(p).unwrap(),
            Cap::from_degrees(Vector3::new(1.0, 0.0, -1.0), 10.0).unwrap(),
        )
        .unwrap();
        assert!(disjoint(&k1, &k2).unwrap_err().is_degenerate());
    }

    #[test]
    fn opposite_examples() {
        let k = cone([0.0; 3], [0.0, 0.0, 1.0], 20.0);
        let o = k.opposite().unwrap();
        assert!((o.base.n() + Vector3::z()).norm() < 1e-12);
        assert!((o.base.half_angle() - k.base.half_angle()).abs() < 1e-12);

        let k = cone([0.0, 0.0, 0.5], [0.0, 0.0, 1.0], 20.0);
        let o = k.opposite().unwrap();
        assert_eq!(o.apex(), k.apex());
        assert!((o.base.n() + Vector3::z()).norm() < 1e-12);
        // pointwise: the opposite of a rim point is on the fitted circle
        for p in k.base.boundary_samples(8) {
            let q = homology_through(&k.apex, &SphereDirection::unchecked(p));
            assert!((angle_between(o.base.n(), q.vector()) - o.base.half_angle()).abs() < 1e-10);
        }
        let back = o.opposite().unwrap();
        assert!((back.base.n() - k.base.n()).norm() < 1e-8);
        assert!((back.base.half_angle() - k.base.half_angle()).abs() < 1e-8);
        assert!(disjoint(&k, &o).unwrap().is_disjoint());
    }

    #[test]
    fn enclosing_examples() {
        let k = cone([0.0; 3], [0.0, 0.0, 1.0], 10.0);
        let e = enclosing_cone(&k, &k).unwrap();
        assert!(cone_leq(&k, &e));

        let tilted = Vector3::new(20f64.to_radians().sin(), 0.0, 20f64.to_radians().cos());
        let k2 = cone([0.0; 3], tilted.into(), 10.0);
        let e = enclosing_cone(&k, &k2).unwrap();
        assert!(cone_leq(&k, &e) && cone_leq(&k2, &e));

        let up = cone([0.0; 3], [0.0, 0.0, 1.0], 80.0);
        let down = cone([0.0; 3], [0.0, 0.0, -1.0], 80.0);
        let e = enclosing_cone(&up, &down).unwrap();
        assert!(cone_leq(&up, &e) && cone_leq(&down, &e));

        let up = cone([0.0, 0.0, -0.5], [0.0, 0.0, 1.0], 100.0);
        let down = cone([0.0, 0.0, 0.5], [0.0, 0.0, -1.0], 100.0);
        assert!(enclosing_cone(&up, &down).is_none());
    }

    #[test]
    fn ray_distance_matches_brute_force() {
        let h = Hyperboloid::new(1.0).unwrap();
        let a = Vector3::new(0.1, -0.2, 0.05);
        let l = Vector3::new(0.0, 0.6, 0.8);
        for p in [
            Vector3::new(0.3, 0.1, -0.4),
            Vector3::new(-0.5, 0.5, 0.5),
            Vector3::new(0.0, 0.2, 0.9),
        ] {
            let exact = cosh_ray_distance(&unit_lift(&p), &unit_lift(&a), &l).acosh();
            let pb = BallPoint::new(p).unwrap();
            let brute = (0..200_000)
                .map(|i| {
                    let t = i as f64 / 200_000.0;
                    let q = BallPoint::clamped(a + (l - a) * t * (1.0 - 1e-12));
                    ball_distance(&pb, &q, &h)
                })
                .fold(f64::INFINITY, f64::min);
            assert!((exact - brute).abs() < 1e-5, "{exact} vs {brute}");
        }
    }

    #[test]
    fn hyperball_examples() {
        let h = Hyperboloid::new(1.0).unwrap();
        let k = cone([0.0; 3], [0.0, 0.0, 1.0], 30.0);
        let tiny = Hyperball::new(k.interior_point(), 1e-3, h).unwrap();
        assert!(hyperball_in_cone(&tiny, &k).unwrap());
        let at_apex = Hyperball::new(BallPoint::origin(), 0.1, h).unwrap();
        assert!(!hyperball_in_cone(&at_apex, &k).unwrap());
        let far = Hyperball::new(bp(0.0, 0.0, -0.5), 0.1, h).unwrap();
        assert!(hyperball_disjoint_from_cone(&far, &k).unwrap());
    }

    #[test]
    fn causal_completion_threshold() {
        // centred shadow of Euclidean radius 3/5 against a cone with apex
        // (0,0,−h): fits iff h sinψ / √(1 + 2h cosψ + h²) > 3/5
        let h = 0.9;
        let threshold = {
            let f = |psi: f64| h * psi.sin() / (1.0 + 2.0 * h * psi.cos() + h * h).sqrt() - 0.6;
            let (mut lo, mut hi) = (0.1, 3.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid
                } else {
                    lo = mid
                }
            }
            lo
        };
        let shell = Hyperboloid::new(2.0).unwrap();
        let x = FourVector::new(1.0, 0.0, 0.0, 0.0);
        for (psi, expect) in [(threshold - 0.02, false), (threshold + 0.02, true)] {
            let k = BallCone::new(
                bp(0.0, 0.0, -h),
                Cap::new(SphereDirection::new(Vector3::z()).unwrap(), psi).unwrap(),
            )
            .unwrap();
            let c = Hypercone::new(shell, k);
            assert_eq!(in_causal_completion(&x, &c).unwrap(), expect);
        }
    }

    #[test]
    fn zero_radius_shadow() {
        let shell = Hyperboloid::new(1.0).unwrap();
        let k = cone([0.0; 3], [0.0, 0.0, 1.0], 30.0);
        let x = crate::ball_model::lift_from_ball(&bp(0.0, 0.0, 0.5), &shell);
        assert!(in_causal_completion(&x, &Hypercone::new(shell, k)).unwrap());
        assert!(in_causal_completion(&FourVector::new(1.0, 0.0, 0.0, 1.0), &Hypercone::new(shell, k))
            .is_err());
    }
}
