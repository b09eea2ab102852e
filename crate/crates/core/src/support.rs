//! Support functions and a GJK distance query for compact convex bodies in ℝ³.

use nalgebra::{DMatrix, DVector, Vector3};

pub(crate) trait Convex {
    /// A point of the body maximising `w·x`.
    fn support_point(&self, w: &Vector3<f64>) -> Vector3<f64>;

    fn support_value(&self, w: &Vector3<f64>) -> f64 {
        w.dot(&self.support_point(w))
    }

    /// Some point of the body, used to seed searches.
    fn any_point(&self) -> Vector3<f64>;
}

/// Closed Euclidean ball.
pub(crate) struct EuclideanBall {
    pub center: Vector3<f64>,
    pub radius: f64,
}

impl Convex for EuclideanBall {
    fn support_point(&self, w: &Vector3<f64>) -> Vector3<f64> {
        let n = w.norm();
        if n == 0.0 {
            return self.center;
        }
        self.center + w * (self.radius / n)
    }

    fn any_point(&self) -> Vector3<f64> {
        self.center
    }
}

#[derive(Clone, Copy)]
struct Vertex {
    diff: Vector3<f64>,
    a: Vector3<f64>,
}

pub(crate) struct GjkResult {
    /// Closest points of the two bodies (equal when they intersect).
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub distance: f64,
}

/// Minimises `|Σλᵢpᵢ|` over the affine hull of `pts`; `None` if degenerate.
fn affine_min(pts: &[Vector3<f64>]) -> Option<Vec<f64>> {
    let k = pts.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    let d = DMatrix::from_fn(3, k - 1, |r, c| pts[c + 1][r] - pts[0][r]);
    let gram = d.transpose() * &d;
    let rhs = -(d.transpose() * DVector::from_column_slice(pts[0].as_slice()));
    let scale = gram.diagonal().max();
    if scale <= 0.0 {
        return None;
    }
    let chol = gram.clone().cholesky()?;
    // reject near-singular hulls; the smaller faces are tried separately
    let det = gram.determinant();
    if det.abs() <= 1e-24 * scale.powi(k as i32 - 1) {
        return None;
    }
    let c = chol.solve(&rhs);
    let mut lambda = Vec::with_capacity(k);
    lambda.push(1.0 - c.sum());
    lambda.extend(c.iter().copied());
    Some(lambda)
}

/// Closest point of the simplex hull to the origin, with the face achieving it.
fn closest_on_simplex(simplex: &[Vertex]) -> (Vec<(Vertex, f64)>, Vector3<f64>) {
    let k = simplex.len();
    let mut best: Option<(Vec<(Vertex, f64)>, Vector3<f64>, f64)> = None;
    for mask in 1u32..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let pts: Vec<Vector3<f64>> = idx.iter().map(|&i| simplex[i].diff).collect();
        let Some(lambda) = affine_min(&pts) else {
            continue;
        };
        if lambda.iter().any(|&l| l < -1e-12) {
            continue;
        }
        let p = pts
            .iter()
            .zip(&lambda)
            .fold(Vector3::zeros(), |acc, (q, l)| acc + q * *l);
        let n = p.norm();
        if best.as_ref().map_or(true, |b| n < b.2 - 1e-15) {
            let face = idx.iter().zip(&lambda).map(|(&i, &l)| (simplex[i], l)).collect();
            best = Some((face, p, n));
        }
    }
    let (face, p, _) = best.expect("a single vertex is always a valid face");
    (face, p)
}

/// Distance between two compact convex bodies.
pub(crate) fn gjk(a: &dyn Convex, b: &dyn Convex) -> GjkResult {
    let support = |w: &Vector3<f64>| {
        let pa = a.support_point(w);
        let pb = b.support_point(&-w);
        Vertex { diff: pa - pb, a: pa }
    };
    let start = a.any_point() - b.any_point();
    let mut simplex = vec![if start.norm() > 0.0 {
        support(&-start)
    } else {
        support(&Vector3::x())
    }];
    let mut face: Vec<(Vertex, f64)> = vec![(simplex[0], 1.0)];
    let mut v = simplex[0].diff;
    for _ in 0..512 {
        let vn = v.norm();
        if vn < 1e-14 {
            break;
        }
        let w = support(&-v);
        // duality gap: |v| − (distance lower bound)
        if vn * vn - v.dot(&w.diff) <= 1e-13 * vn * vn.max(1e-3) {
            break;
        }
        simplex = face.iter().map(|(x, _)| *x).collect();
        simplex.push(w);
        let (f, p) = closest_on_simplex(&simplex);
        if p.norm() >= vn * (1.0 - 1e-15) {
            break;
        }
        face = f;
        v = p;
        if face.len() == 4 {
            break;
        }
    }
    let pa = face.iter().fold(Vector3::zeros(), |acc, (x, l)| acc + x.a * *l);
    GjkResult {
        a: pa,
        b: pa - v,
        distance: v.norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_balls() {
        let a = EuclideanBall {
            center: Vector3::new(0.0, 0.0, 0.0),
            radius: 1.0,
        };
        let b = EuclideanBall {
            center: Vector3::new(3.0, 4.0, 0.0),
            radius: 2.0,
        };
        let r = gjk(&a, &b);
        assert!((r.distance - 2.0).abs() < 1e-6);
        assert!((r.a - Vector3::new(0.6, 0.8, 0.0)).norm() < 1e-3);
    }

    #[test]
    fn overlapping_balls() {
        let a = EuclideanBall {
            center: Vector3::zeros(),
            radius: 1.0,
        };
        let b = EuclideanBall {
            center: Vector3::new(1.0, 0.2, 0.0),
            radius: 0.5,
        };
        let r = gjk(&a, &b);
        assert!(r.distance < 1e-10);
    }
}
