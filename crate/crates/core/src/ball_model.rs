//! Time-shells, the Beltrami–Klein ball, hyperbolic distances and the
//! Lorentz actions induced on the ball and on the celestial sphere.

use std::fmt;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::minkowski::{FourVector, LorentzTransform};
use crate::numeric::{angle_between, orthonormal_frame};
use crate::{Error, Result, Tolerances};

/// The time-shell `H_τ = {x₀ = √(|x|² + τ²)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Hyperboloid {
    tau: f64,
}

impl Hyperboloid {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Relative residual of `a` against the shell equation.
    pub fn residual(&self, a: &FourVector) -> f64 {
        let expect = a.xs.norm().hypot(self.tau);
        (a.x0 - expect).abs() / expect
    }

    pub fn check_on_shell(&self, a: &FourVector) -> Result<()> {
        let residual = self.residual(a);
        if !(a.is_finite() && residual < Tolerances::DEFAULT.shell) {
            return Err(Error::OffShell {
                tau: self.tau,
                residual,
            });
        }
        Ok(())
    }
}

impl TryFrom<f64> for Hyperboloid {
    type Error = Error;
    fn try_from(tau: f64) -> Result<Self> {
        Hyperboloid::new(tau)
    }
}

impl From<Hyperboloid> for f64 {
    fn from(h: Hyperboloid) -> f64 {
        h.tau
    }
}

/// A point of the open unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BallPoint {
    u: Vector3<f64>,
}

impl BallPoint {
    pub fn new(u: Vector3<f64>) -> Result<Self> {
        if !u.iter().all(|c| c.is_finite()) || u.norm_squared() >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "ball point must satisfy |u| < 1, got |u| = {}",
                u.norm()
            )));
        }
        Ok(Self { u })
    }

    pub fn origin() -> Self {
        Self { u: Vector3::zeros() }
    }

    /// Pulls points on or beyond the sphere (from rounding) back inside.
    pub(crate) fn clamped(u: Vector3<f64>) -> Self {
        let n2 = u.norm_squared();
        if n2 < 1.0 {
            Self { u }
        } else {
            Self {
                u: u / n2.sqrt() * (1.0 - f64::EPSILON),
            }
        }
    }

    pub fn coords(&self) -> &Vector3<f64> {
        &self.u
    }
}

impl TryFrom<[f64; 3]> for BallPoint {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        BallPoint::new(Vector3::from(a))
    }
}

impl From<BallPoint> for [f64; 3] {
    fn from(p: BallPoint) -> Self {
        p.u.into()
    }
}

impl fmt::Display for BallPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.u.x, self.u.y, self.u.z)
    }
}

/// A point of the unit sphere, i.e. a lightlike direction `(1, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SphereDirection {
    l: Vector3<f64>,
}

impl SphereDirection {
    pub fn new(l: Vector3<f64>) -> Result<Self> {
        let n = l.norm();
        if !n.is_finite() || (n - 1.0).abs() > Tolerances::DEFAULT.linear {
            return Err(Error::InvalidInput(format!(
                "direction must be a unit vector, got |l| = {n}"
            )));
        }
        Ok(Self { l })
    }

    /// Normalises any nonzero finite vector.
    pub fn normalize(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 1e-300) {
            return Err(Error::InvalidInput("cannot normalise a zero vector".into()));
        }
        Ok(Self { l: v / n })
    }

    pub(crate) fn unchecked(v: Vector3<f64>) -> Self {
        Self { l: v.normalize() }
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.l
    }

    pub fn lightlike(&self) -> FourVector {
        FourVector::from_parts(1.0, self.l)
    }
}

impl TryFrom<[f64; 3]> for SphereDirection {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        SphereDirection::new(Vector3::from(a))
    }
}

impl From<SphereDirection> for [f64; 3] {
    fn from(d: SphereDirection) -> Self {
        d.l.into()
    }
}

/// An open spherical cap `{l : angle(l, axis) < half_angle}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CapRepr", into = "CapRepr")]
pub struct Cap {
    axis: SphereDirection,
    half_angle: f64,
}

#[derive(Serialize, Deserialize)]
struct CapRepr {
    axis: SphereDirection,
    half_angle: f64,
}

impl TryFrom<CapRepr> for Cap {
    type Error = Error;
    fn try_from(r: CapRepr) -> Result<Self> {
        Cap::new(r.axis, r.half_angle)
    }
}

impl From<Cap> for CapRepr {
    fn from(c: Cap) -> Self {
        CapRepr {
            axis: c.axis,
            half_angle: c.half_angle,
        }
    }
}

impl Cap {
    pub fn new(axis: SphereDirection, half_angle: f64) -> Result<Self> {
        if !(half_angle > 0.0 && half_angle < std::f64::consts::PI) {
            return Err(Error::InvalidInput(format!(
                "cap half-angle must lie in (0, π), got {half_angle}"
            )));
        }
        Ok(Self { axis, half_angle })
    }

    /// Convenience constructor from a raw axis and an angle in degrees.
    pub fn from_degrees(axis: Vector3<f64>, degrees: f64) -> Result<Self> {
        Cap::new(SphereDirection::normalize(axis)?, degrees.to_radians())
    }

    pub fn axis(&self) -> &SphereDirection {
        &self.axis
    }

    pub fn n(&self) -> &Vector3<f64> {
        &self.axis.l
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// Strict membership of a direction (need not be normalised).
    pub fn contains(&self, v: &Vector3<f64>) -> bool {
        angle_between(self.n(), v) < self.half_angle
    }

    /// Point of the boundary circle at polar angle `theta`.
    pub fn boundary_point(&self, theta: f64) -> Vector3<f64> {
        let (e1, e2) = orthonormal_frame(self.n());
        let (s, c) = self.half_angle.sin_cos();
        self.n() * c + (e1 * theta.cos() + e2 * theta.sin()) * s
    }

    pub fn boundary_samples(&self, count: usize) -> Vec<Vector3<f64>> {
        (0..count)
            .map(|i| self.boundary_point(std::f64::consts::TAU * i as f64 / count as f64))
            .collect()
    }
}

/// `a/a₀` for `a` on `H_τ`.
pub fn project_to_ball(a: &FourVector, h: &Hyperboloid) -> Result<BallPoint> {
    h.check_on_shell(a)?;
    Ok(BallPoint::clamped(a.xs / a.x0))
}

/// `(a₀, a₀u)` with `a₀ = τ/√(1 − u²)`.
pub fn lift_from_ball(u: &BallPoint, h: &Hyperboloid) -> FourVector {
    let a0 = h.tau / (1.0 - u.u.norm_squared()).sqrt();
    FourVector::from_parts(a0, u.u * a0)
}

/// Geodesic distance on `H_τ`, `τ cosh⁻¹(ab/τ²)`.
///
/// Close points use the equivalent `2τ sinh⁻¹(√(−(a−b)²)/2τ)` to avoid
/// the flat region of `cosh⁻¹` near 1.
pub fn hyperboloid_distance(a: &FourVector, b: &FourVector, h: &Hyperboloid) -> Result<f64> {
    h.check_on_shell(a)?;
    h.check_on_shell(b)?;
    let tau = h.tau;
    let x = a.dot(b) / (tau * tau);
    if x > 2.0 {
        return Ok(tau * x.acosh());
    }
    let d = *a - *b;
    let spacelike = (d.xs.norm_squared() - d.x0 * d.x0).max(0.0);
    Ok(2.0 * tau * (spacelike.sqrt() / (2.0 * tau)).asinh())
}

/// Geodesic distance in the ball model.
///
/// Evaluated as `τ sinh⁻¹ √((|u−v|² − |u×v|²)/((1−u²)(1−v²)))`, which is the
/// same quantity as `τ cosh⁻¹((1 − u·v)/√((1−u²)(1−v²)))` without the
/// cancellation near the diagonal.
pub fn ball_distance(u: &BallPoint, v: &BallPoint, h: &Hyperboloid) -> f64 {
    let (u, v) = (&u.u, &v.u);
    let num = ((u - v).norm_squared() - u.cross(v).norm_squared()).max(0.0);
    let den = (1.0 - u.norm_squared()) * (1.0 - v.norm_squared());
    h.tau * (num / den).sqrt().asinh()
}

/// Hyperbolic radius `τ c_{σ,τ}` of the causal shadow on `H_τ` of a point on `H_σ`.
///
/// `c_{σ,τ} = cosh⁻¹((σ² + τ²)/2στ)` equals `|ln(σ/τ)|`, which is what is
/// evaluated here.
pub fn shadow_radius(sigma: f64, tau: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0 && tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidInput(format!(
            "shadow radius needs positive sigma and tau, got {sigma}, {tau}"
        )));
    }
    Ok(tau * shadow_parameter(sigma, tau))
}

/// The dimensionless `c_{σ,τ}`.
pub fn shadow_parameter(sigma: f64, tau: f64) -> f64 {
    ((sigma - tau) / tau).ln_1p().abs()
}

fn projective_action(m: &nalgebra::Matrix4<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    let den = m[(0, 0)] + m[(0, 1)] * v.x + m[(0, 2)] * v.y + m[(0, 3)] * v.z;
    Vector3::from_fn(|i, _| {
        (m[(i + 1, 0)] + m[(i + 1, 1)] * v.x + m[(i + 1, 2)] * v.y + m[(i + 1, 3)] * v.z) / den
    })
}

/// Action of `L` on the ball, `vᵢ ↦ (Λᵢ₀ + Λᵢₖvₖ)/(Λ₀₀ + Λ₀ₖvₖ)`.
pub fn lorentz_ball_action(l: &LorentzTransform, u: &BallPoint) -> BallPoint {
    BallPoint::clamped(projective_action(l.matrix(), &u.u))
}

/// The same projective formula evaluated on the sphere.
pub fn lorentz_sphere_action(l: &LorentzTransform, d: &SphereDirection) -> SphereDirection {
    SphereDirection::unchecked(projective_action(l.matrix(), &d.l))
}

/// Ball action of the boost along `l` with rapidity `chi`, in closed form.
pub fn boost_ball_action(l: &SphereDirection, chi: f64, u: &BallPoint) -> BallPoint {
    let (sh, ch) = (chi.sinh(), chi.cosh());
    let (l, v) = (&l.l, &u.u);
    let vl = v.dot(l);
    let perp = v - l * vl;
    BallPoint::clamped(((sh + ch * vl) * l + perp) / (ch + sh * vl))
}

/// Second intersection with the sphere of the line through `u0` and `l`.
pub fn homology_through(u0: &BallPoint, l: &SphereDirection) -> SphereDirection {
    let d = u0.u - l.l;
    let s = -2.0 * l.l.dot(&d) / d.norm_squared();
    SphereDirection::unchecked(l.l + d * s)
}

const FIT_SAMPLES: usize = 16;

/// Fits a cap to points assumed to lie on one circle of the sphere.
///
/// The circle is the section of the sphere by the least-squares plane; the cap
/// is chosen on the side of `inside`.
pub(crate) fn fit_cap(points: &[Vector3<f64>], inside: &Vector3<f64>) -> Result<Cap> {
    let tol = Tolerances::DEFAULT;
    let k = points.len() as f64;
    let centroid = points.iter().fold(Vector3::zeros(), |a, p| a + p) / k;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let imin = eig.eigenvalues.imin();
    let mut n: Vector3<f64> = eig.eigenvectors.column(imin).into_owned().normalize();
    let mut offset = n.dot(&centroid);
    if n.dot(inside) < offset {
        n = -n;
        offset = -offset;
    }
    let residual = points
        .iter()
        .map(|p| (n.dot(p) - offset).abs())
        .fold(0.0, f64::max);
    if residual > tol.fit_residual {
        return Err(Error::Numerical(format!(
            "circle fit residual {residual:e} exceeds {:e}",
            tol.fit_residual
        )));
    }
    if offset.abs() >= 1.0 {
        return Err(Error::Numerical(format!(
            "fitted plane misses the sphere (offset {offset})"
        )));
    }
    Cap::new(SphereDirection::unchecked(n), offset.acos())
}

/// Image of a cap under the sphere action of `L`.
pub fn cap_image(l: &LorentzTransform, c: &Cap) -> Result<Cap> {
    let mapped: Vec<Vector3<f64>> = c
        .boundary_samples(FIT_SAMPLES)
        .iter()
        .map(|p| lorentz_sphere_action(l, &SphereDirection::unchecked(*p)).l)
        .collect();
    let inside = lorentz_sphere_action(l, c.axis()).l;
    fit_cap(&mapped, &inside)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn bp(x: f64, y: f64, z: f64) -> BallPoint {
        BallPoint::new(Vector3::new(x, y, z)).unwrap()
    }

    fn shell(t: f64) -> Hyperboloid {
        Hyperboloid::new(t).unwrap()
    }

    #[test]
    fn projection_examples() {
        let u = project_to_ball(&FourVector::new(1.0, 0.0, 0.0, 0.0), &shell(1.0)).unwrap();
        assert_eq!(u.coords(), &Vector3::zeros());
        let u = project_to_ball(&FourVector::new(1.25, 0.75, 0.0, 0.0), &shell(1.0)).unwrap();
        assert!((u.coords().x - 0.6).abs() < 1e-15);
        let a = FourVector::new(2.0 * 2f64.sqrt(), 2.0, 0.0, 0.0);
        let u = project_to_ball(&a, &shell(2.0)).unwrap();
        assert!((u.coords().x - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(project_to_ball(&FourVector::new(1.0, 0.5, 0.0, 0.0), &shell(1.0)).is_err());
    }

    #[test]
    fn lift_examples() {
        assert_eq!(
            lift_from_ball(&BallPoint::origin(), &shell(1.0)),
            FourVector::new(1.0, 0.0, 0.0, 0.0)
        );
        let a = lift_from_ball(&bp(0.6, 0.0, 0.0), &shell(1.0));
        assert!((a - FourVector::new(1.25, 0.75, 0.0, 0.0)).max_abs() < 1e-15);
        let a = lift_from_ball(&bp(0.0, 0.0, 0.8), &shell(3.0));
        assert!((a - FourVector::new(5.0, 0.0, 0.0, 4.0)).max_abs() < 1e-14);
    }

    #[test]
    fn distances() {
        let h = shell(1.0);
        let e = FourVector::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(hyperboloid_distance(&e, &e, &h).unwrap(), 0.0);
        let a = FourVector::new(1.25, 0.75, 0.0, 0.0);
        assert!((hyperboloid_distance(&a, &e, &h).unwrap() - LN_2).abs() < 1e-15);
        let h2 = shell(2.0);
        let d = hyperboloid_distance(&(2.0 * a), &(2.0 * e), &h2).unwrap();
        assert!((d - 2.0 * LN_2).abs() < 1e-14);

        let u = bp(0.6, 0.0, 0.0);
        assert_eq!(ball_distance(&u, &u, &h), 0.0);
        assert!((ball_distance(&BallPoint::origin(), &u, &h) - LN_2).abs() < 1e-15);
        let d = ball_distance(&u, &bp(-0.6, 0.0, 0.0), &h);
        assert!((d - 2.125f64.acosh()).abs() < 1e-14);
    }

    #[test]
    fn shadows() {
        assert_eq!(shadow_radius(1.0, 1.0).unwrap(), 0.0);
        assert!((shadow_radius(1.0, 2.0).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        let c = shadow_parameter(1.0, 2.0);
        assert!((c.tanh() - 0.6).abs() < 1e-15);
        assert!(shadow_radius(0.0, 1.0).is_err());
    }

    #[test]
    fn actions() {
        let u = bp(0.3, 0.0, 0.0);
        let id = LorentzTransform::identity();
        assert_eq!(lorentz_ball_action(&id, &u), u);
        let bz = LorentzTransform::boost(&Vector3::z(), 0.8).unwrap();
        let img = lorentz_ball_action(&bz, &BallPoint::origin());
        assert!((img.coords() - Vector3::new(0.0, 0.0, 0.8f64.tanh())).norm() < 1e-15);
        let rz = LorentzTransform::rotation(&Vector3::z(), std::f64::consts::FRAC_PI_2).unwrap();
        let img = lorentz_ball_action(&rz, &u);
        assert!((img.coords() - Vector3::new(0.0, 0.3, 0.0)).norm() < 1e-15);

        let z = SphereDirection::new(Vector3::z()).unwrap();
        assert_eq!(boost_ball_action(&z, 0.0, &u), u);
        let img = boost_ball_action(&z, 2.0, &BallPoint::origin());
        assert!((img.coords().z - 2f64.tanh()).abs() < 1e-15);
        for v in [bp(0.1, -0.5, 0.2), bp(-0.7, 0.1, -0.6), bp(0.0, 0.0, 0.99)] {
            let a = boost_ball_action(&z, 1.3, &v);
            let b = lorentz_ball_action(&LorentzTransform::boost(&Vector3::z(), 1.3).unwrap(), &v);
            assert!((a.coords() - b.coords()).norm() < 1e-12);
        }
    }

    #[test]
    fn homology_examples() {
        let l = SphereDirection::new(Vector3::new(0.0, 0.0, 1.0)).unwrap();
        let img = homology_through(&BallPoint::origin(), &l);
        assert!((img.vector() + l.vector()).norm() < 1e-15);
        let img = homology_through(&bp(0.0, 0.0, 0.5), &l);
        assert!((img.vector() - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
        let x = SphereDirection::new(Vector3::x()).unwrap();
        let img = homology_through(&bp(0.0, 0.0, 0.5), &x);
        assert!((img.vector() - Vector3::new(-0.6, 0.0, 0.8)).norm() < 1e-15);
        let back = homology_through(&bp(0.0, 0.0, 0.5), &img);
        assert!((back.vector() - x.vector()).norm() < 1e-14);
    }

    #[test]
    fn cap_images() {
        let c = Cap::from_degrees(Vector3::x(), 20.0).unwrap();
        let same = cap_image(&LorentzTransform::identity(), &c).unwrap();
        assert!((same.n() - c.n()).norm() < 1e-12);
        assert!((same.half_angle() - c.half_angle()).abs() < 1e-12);

        let r = LorentzTransform::rotation(&Vector3::z(), 0.5).unwrap();
        let img = cap_image(&r, &c).unwrap();
        assert!((img.n() - Vector3::new(0.5f64.cos(), 0.5f64.sin(), 0.0)).norm() < 1e-12);
        assert!((img.half_angle() - c.half_angle()).abs() < 1e-12);

        let bz = LorentzTransform::boost(&Vector3::z(), 1.0).unwrap();
        let img = cap_image(&bz, &c).unwrap();
        for p in c.boundary_samples(32) {
            let q = lorentz_sphere_action(&bz, &SphereDirection::unchecked(p));
            let ang = angle_between(img.n(), q.vector());
            assert!((ang - img.half_angle()).abs() < 1e-9);
        }
        assert!(img.contains(lorentz_sphere_action(&bz, c.axis()).vector()));
    }

    #[test]
    fn rejects_invalid_values() {
        assert!(BallPoint::new(Vector3::new(1.0, 0.0, 0.0)).is_err());
        assert!(SphereDirection::new(Vector3::new(1.0, 1.0, 0.0)).is_err());
        assert!(Cap::from_degrees(Vector3::z(), 180.0).is_err());
        assert!(Cap::from_degrees(Vector3::z(), 0.0).is_err());
        assert!(Hyperboloid::new(-1.0).is_err());
    }
}
