//! Four-vectors, Lorentz maps and the semigroup `T₊ ⋊ L₊^↑`.
//!
//! The metric has signature `(+,−,−,−)` throughout, so `x² = x₀² − |x|²` is
//! positive for timelike vectors.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix4, Rotation3, Unit, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tolerances};

/// An event (or translation) in Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct FourVector {
    pub x0: f64,
    pub xs: Vector3<f64>,
}

impl FourVector {
    pub const ZERO: FourVector = FourVector {
        x0: 0.0,
        xs: Vector3::new(0.0, 0.0, 0.0),
    };

    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self {
            x0,
            xs: Vector3::new(x1, x2, x3),
        }
    }

    pub fn from_parts(x0: f64, xs: Vector3<f64>) -> Self {
        Self { x0, xs }
    }

    /// The unit time direction `e = (1, 0)`.
    pub fn time_unit() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.x0.is_finite() && self.xs.iter().all(|c| c.is_finite())
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x0, self.xs.x, self.xs.y, self.xs.z]
    }

    pub fn to_vector4(&self) -> Vector4<f64> {
        Vector4::new(self.x0, self.xs.x, self.xs.y, self.xs.z)
    }

    pub fn from_vector4(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    /// Minkowski scalar product with `other`.
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.x0 * other.x0 - self.xs.dot(&other.xs)
    }

    /// `x² = x₀² − |x|²`.
    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    pub fn spatial_norm(&self) -> f64 {
        self.xs.norm()
    }

    /// Largest absolute component; used to scale relative tolerances.
    pub fn max_abs(&self) -> f64 {
        self.xs.amax().max(self.x0.abs())
    }
}

impl From<[f64; 4]> for FourVector {
    fn from(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl From<FourVector> for [f64; 4] {
    fn from(v: FourVector) -> Self {
        v.to_array()
    }
}

impl fmt::Display for FourVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.x0, self.xs.x, self.xs.y, self.xs.z
        )
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector::from_parts(self.x0 + rhs.x0, self.xs + rhs.xs)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector::from_parts(self.x0 - rhs.x0, self.xs - rhs.xs)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::from_parts(-self.x0, -self.xs)
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, rhs: FourVector) -> FourVector {
        FourVector::from_parts(self * rhs.x0, self * rhs.xs)
    }
}

/// Minkowski product `a₀b₀ − a·b`.
pub fn minkowski_product(a: &FourVector, b: &FourVector) -> f64 {
    a.dot(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CausalClass {
    TimelikeFuture,
    TimelikePast,
    LightlikeFuture,
    LightlikePast,
    Spacelike,
    Zero,
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalClass::TimelikeFuture => "timelike-future",
            CausalClass::TimelikePast => "timelike-past",
            CausalClass::LightlikeFuture => "lightlike-future",
            CausalClass::LightlikePast => "lightlike-past",
            CausalClass::Spacelike => "spacelike",
            CausalClass::Zero => "zero",
        };
        f.write_str(s)
    }
}

/// Causal character of `x`. The null test is relative to the size of `x`.
pub fn causal_class(x: &FourVector) -> CausalClass {
    let tol = Tolerances::DEFAULT.linear;
    let scale = x.max_abs();
    if scale < tol {
        return CausalClass::Zero;
    }
    // compare x0 with |x| rather than forming x², which cancels badly
    let t = x.x0.abs();
    let r = x.spatial_norm();
    let gap = (t - r) / scale;
    if gap.abs() <= tol {
        if x.x0 > 0.0 {
            CausalClass::LightlikeFuture
        } else {
            CausalClass::LightlikePast
        }
    } else if gap > 0.0 {
        if x.x0 > 0.0 {
            CausalClass::TimelikeFuture
        } else {
            CausalClass::TimelikePast
        }
    } else {
        CausalClass::Spacelike
    }
}

/// Strict membership in the open forward light cone `x₀ > |x|`.
pub fn in_light_cone(x: &FourVector) -> bool {
    x.x0 > x.spatial_norm()
}

/// Membership in the closed forward light cone, with absolute slack `tol`.
pub fn in_closed_light_cone(x: &FourVector, tol: f64) -> bool {
    x.x0 >= x.spatial_norm() - tol
}

fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// A proper orthochronous Lorentz transformation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 4]; 4]", into = "[[f64; 4]; 4]")]
pub struct LorentzTransform {
    m: Matrix4<f64>,
}

impl LorentzTransform {
    /// Wraps `m` after checking `mᵀηm = η`, `m₀₀ ≥ 1` and `det m = 1`.
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let t = Self { m };
        t.verify(Tolerances::DEFAULT.matrix)?;
        Ok(t)
    }

    pub fn identity() -> Self {
        Self {
            m: Matrix4::identity(),
        }
    }

    /// Pure boost along the unit vector `dir` with rapidity `chi`.
    ///
    /// With this convention `Λ (1, dir) = e^χ (1, dir)`, so a positive rapidity
    /// pushes the origin of the ball towards `dir`.
    pub fn boost(dir: &Vector3<f64>, chi: f64) -> Result<Self> {
        let n = dir.norm();
        if !(n.is_finite() && (n - 1.0).abs() < 1e-9) || !chi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "boost needs a unit direction and finite rapidity, got |l| = {n}, chi = {chi}"
            )));
        }
        let l = dir / n;
        let (sh, ch) = (chi.sinh(), chi.cosh());
        let mut m = Matrix4::identity();
        m[(0, 0)] = ch;
        for i in 0..3 {
            m[(0, i + 1)] = sh * l[i];
            m[(i + 1, 0)] = sh * l[i];
            for k in 0..3 {
                m[(i + 1, k + 1)] += (ch - 1.0) * l[i] * l[k];
            }
        }
        Ok(Self { m })
    }

    /// Spatial rotation by `angle` about `axis` (right-handed).
    pub fn rotation(axis: &Vector3<f64>, angle: f64) -> Result<Self> {
        if axis.norm() < 1e-15 || !angle.is_finite() {
            return Err(Error::InvalidInput("rotation needs a nonzero axis".into()));
        }
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(*axis), angle);
        Ok(Self::from_rotation(&r))
    }

    pub fn from_rotation(r: &Rotation3<f64>) -> Self {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(r.matrix());
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    pub fn apply(&self, x: &FourVector) -> FourVector {
        FourVector::from_vector4(&(self.m * x.to_vector4()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LorentzTransform) -> LorentzTransform {
        LorentzTransform { m: self.m * other.m }
    }

    /// `η mᵀ η`, exact for Lorentz matrices.
    pub fn inverse(&self) -> LorentzTransform {
        let e = eta();
        LorentzTransform {
            m: e * self.m.transpose() * e,
        }
    }

    /// Checks the defining identities within `tol`.
    pub fn verify(&self, tol: f64) -> Result<()> {
        if self.m.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite Lorentz matrix".into()));
        }
        let e = eta();
        let defect = (self.m.transpose() * e * self.m - e).amax();
        // the identity is quadratic in m, so scale by the size of the entries
        let scale = self.m.amax().max(1.0).powi(2);
        if defect > tol * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not Lorentz: |mᵀηm − η| = {defect:e}"
            )));
        }
        if self.m[(0, 0)] < 1.0 - tol * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not orthochronous: m00 = {}",
                self.m[(0, 0)]
            )));
        }
        let det = self.m.determinant();
        if (det - 1.0).abs() > tol * scale * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not proper: det = {det}"
            )));
        }
        Ok(())
    }

    /// Spectral norm of `self − other`, used to measure neighbourhoods.
    pub fn distance(&self, other: &LorentzTransform) -> f64 {
        (self.m - other.m).singular_values().max()
    }
}

impl TryFrom<[[f64; 4]; 4]> for LorentzTransform {
    type Error = Error;
    fn try_from(rows: [[f64; 4]; 4]) -> Result<Self> {
        let m = Matrix4::from_fn(|i, j| rows[i][j]);
        LorentzTransform::new(m)
    }
}

impl From<LorentzTransform> for [[f64; 4]; 4] {
    fn from(t: LorentzTransform) -> Self {
        let mut rows = [[0.0; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = t.m[(i, j)];
            }
        }
        rows
    }
}

/// A Poincaré transformation `x ↦ Λx + a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareElement {
    pub translation: FourVector,
    pub lorentz: LorentzTransform,
}

impl PoincareElement {
    pub fn new(translation: FourVector, lorentz: LorentzTransform) -> Self {
        Self {
            translation,
            lorentz,
        }
    }

    pub fn apply(&self, x: &FourVector) -> FourVector {
        self.lorentz.apply(x) + self.translation
    }

    /// `(a, Λ)(b, M) = (a + Λb, ΛM)`.
    pub fn compose(&self, other: &PoincareElement) -> PoincareElement {
        PoincareElement {
            translation: self.translation + self.lorentz.apply(&other.translation),
            lorentz: self.lorentz.compose(&other.lorentz),
        }
    }
}

/// Membership in `S = T₊ ⋊ L₊^↑`: closed-cone translation, valid Lorentz part.
pub fn in_semigroup(element: &PoincareElement) -> bool {
    let tol = Tolerances::DEFAULT;
    let scale = element.translation.max_abs().max(1.0);
    in_closed_light_cone(&element.translation, tol.linear * scale)
        && element.lorentz.verify(tol.matrix).is_ok()
}

/// Splits `z = x − y` with both `x` and `y` in the closed forward cone.
///
/// The canonical choice is `x = (|z| + max(z₀, 0), z)`, which is exact on
/// rational inputs and has the smallest time component of its kind.
pub fn decompose_translation(z: &FourVector) -> (FourVector, FourVector) {
    let x = FourVector::from_parts(z.spatial_norm() + z.x0.max(0.0), z.xs);
    let y = x - *z;
    (x, y)
}

/// `x = l + κ e` with `κ = x₀ − |x|` and `l` lightlike-future (or zero).
pub fn kappa_split(x: &FourVector) -> (FourVector, f64) {
    let r = x.spatial_norm();
    let kappa = x.x0 - r;
    (FourVector::from_parts(r, x.xs), kappa)
}

/// The boost fixing the null rays through `l = (1, l)` and `l' = (1, −l)`
/// with `Λl = β⁻¹ l` and `Λl' = β l'`.
pub fn lightlike_boost(l: &FourVector, beta: f64) -> Result<LorentzTransform> {
    let tol = Tolerances::DEFAULT;
    if (l.x0 - 1.0).abs() > tol.linear || (l.spatial_norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "expected a lightlike vector normalised to l0 = 1, got {l}"
        )));
    }
    if !(beta.is_finite() && beta >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "boost parameter must satisfy beta >= 1, got {beta}"
        )));
    }
    LorentzTransform::boost(&(l.xs / l.spatial_norm()), -beta.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(a: f64, b: f64, c: f64, d: f64) -> FourVector {
        FourVector::new(a, b, c, d)
    }

    #[test]
    fn products() {
        assert_eq!(minkowski_product(&fv(1., 0., 0., 0.), &fv(1., 0., 0., 0.)), 1.0);
        assert_eq!(minkowski_product(&fv(1., 0., 0., 1.), &fv(1., 0., 0., 1.)), 0.0);
        assert_eq!(
            minkowski_product(&fv(1.25, 0.75, 0., 0.), &fv(1., 0., 0., 0.)),
            1.25
        );
    }

    #[test]
    fn classes() {
        assert_eq!(causal_class(&fv(2., 1., 0., 0.)), CausalClass::TimelikeFuture);
        assert_eq!(causal_class(&fv(0., 1., 0., 0.)), CausalClass::Spacelike);
        assert_eq!(causal_class(&fv(-1., 0., 0., 1.)), CausalClass::LightlikePast);
        assert_eq!(causal_class(&fv(-2., 0., 1., 0.)), CausalClass::TimelikePast);
        assert_eq!(causal_class(&fv(1., 0., 1., 0.)), CausalClass::LightlikeFuture);
        assert_eq!(causal_class(&FourVector::ZERO), CausalClass::Zero);
    }

    #[test]
    fn light_cone_membership() {
        assert!(in_light_cone(&fv(1., 0., 0., 0.)));
        assert!(!in_light_cone(&fv(1., 0., 0., 1.)));
        assert!(in_light_cone(&fv(2., 1., 1., 1.)));
        assert!(in_closed_light_cone(&fv(1., 0., 0., 1.), 0.0));
    }

    #[test]
    fn decomposition_examples() {
        let (x, y) = decompose_translation(&fv(-1., 0., 0., 0.));
        assert_eq!((x, y), (fv(0., 0., 0., 0.), fv(1., 0., 0., 0.)));
        let (x, y) = decompose_translation(&fv(0., 5., 0., 0.));
        assert_eq!((x, y), (fv(5., 5., 0., 0.), fv(5., 0., 0., 0.)));
        let (x, y) = decompose_translation(&fv(3., 0., 0., 0.));
        assert_eq!((x, y), (fv(3., 0., 0., 0.), FourVector::ZERO));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_split(&fv(2., 1., 0., 0.)), (fv(1., 1., 0., 0.), 1.0));
        assert_eq!(kappa_split(&fv(1., 0., 0., 0.)), (FourVector::ZERO, 1.0));
        assert_eq!(kappa_split(&fv(1., 0., 0., 2.)), (fv(2., 0., 0., 2.), -1.0));
    }

    #[test]
    fn boost_eigenrelations() {
        let l = fv(1., 0., 0., 1.);
        let lp = fv(1., 0., 0., -1.);
        let id = lightlike_boost(&l, 1.0).unwrap();
        assert!((id.matrix() - Matrix4::identity()).amax() < 1e-15);

        let b = lightlike_boost(&l, 2.0).unwrap();
        let img = b.apply(&l);
        assert!((img - 0.5 * l).max_abs() < 1e-12);
        let img = b.apply(&lp);
        assert!((img - 2.0 * lp).max_abs() < 1e-12);

        // rapidity ln β: the 00 entry is cosh(ln 2) = 5/4
        assert!((b.matrix()[(0, 0)] - 1.25).abs() < 1e-12);

        let e = std::f64::consts::E;
        let bx = lightlike_boost(&fv(1., 1., 0., 0.), e).unwrap();
        assert!((bx.matrix()[(0, 0)] - 1f64.cosh()).abs() < 1e-12);
        assert!((bx.matrix()[(0, 1)] + 1f64.sinh()).abs() < 1e-12);
    }

    #[test]
    fn boost_rejects_bad_input() {
        assert!(lightlike_boost(&fv(1., 0.5, 0., 0.), 2.0).is_err());
        assert!(lightlike_boost(&fv(2., 0., 0., 2.), 2.0).is_err());
        assert!(lightlike_boost(&fv(1., 0., 0., 1.), 0.5).is_err());
    }

    #[test]
    fn semigroup_membership() {
        let id = LorentzTransform::identity();
        assert!(in_semigroup(&PoincareElement::new(fv(1., 0., 0., 0.), id)));
        assert!(!in_semigroup(&PoincareElement::new(fv(0., 1., 0., 0.), id)));
        let bz = LorentzTransform::boost(&Vector3::z(), 0.7).unwrap();
        assert!(in_semigroup(&PoincareElement::new(fv(1., 0., 0., 1.), bz)));
    }

    #[test]
    fn rejects_non_lorentz_matrix() {
        let mut m = Matrix4::identity();
        m[(0, 0)] = 2.0;
        assert!(LorentzTransform::new(m).is_err());
        let parity = Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, 1.0, 1.0));
        assert!(LorentzTransform::new(parity).is_err());
        let time_rev = Matrix4::from_diagonal(&Vector4::new(-1.0, -1.0, 1.0, 1.0));
        assert!(LorentzTransform::new(time_rev).is_err());
    }

    #[test]
    fn inverse_and_serde() {
        let t = LorentzTransform::boost(&Vector3::new(0.6, 0.0, 0.8), 1.3)
            .unwrap()
            .compose(&LorentzTransform::rotation(&Vector3::y(), 0.4).unwrap());
        let p = t.compose(&t.inverse());
        assert!((p.matrix() - Matrix4::identity()).amax() < 1e-12);
        let json = serde_json::to_string(&t).unwrap();
        let back: LorentzTransform = serde_json::from_str(&json).unwrap();
        assert!((back.matrix() - t.matrix()).amax() < 1e-15);
    }
}
