//! Small numerical helpers shared by the geometry modules.

use nalgebra::Vector3;

/// Angle between two nonzero vectors, accurate near 0 and π.
pub fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Two unit vectors completing `n` (assumed unit) to a right-handed frame.
pub fn orthonormal_frame(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let seed = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = (seed - n * n.dot(&seed)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

/// Rotates the unit vector `a` towards the unit vector `b` by `angle`.
///
/// For antipodal inputs an arbitrary perpendicular direction is used.
pub fn rotate_towards(a: &Vector3<f64>, b: &Vector3<f64>, angle: f64) -> Vector3<f64> {
    let perp = b - a * a.dot(b);
    let t = if perp.norm() < 1e-14 {
        orthonormal_frame(a).0
    } else {
        perp.normalize()
    };
    (a * angle.cos() + t * angle.sin()).normalize()
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimum of a periodic function of an angle: coarse scan then refinement
/// around the best few samples.
pub fn periodic_min(f: impl Fn(f64) -> f64, samples: usize) -> (f64, f64) {
    let step = std::f64::consts::TAU / samples as f64;
    let values: Vec<f64> = (0..samples).map(|i| f(i as f64 * step)).collect();
    let mut order: Vec<usize> = (0..samples).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut best = (order[0] as f64 * step, values[order[0]]);
    for &i in order.iter().take(3) {
        let c = i as f64 * step;
        let (t, v) = golden_min(&f, c - step, c + step, 60);
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}

/// Nelder–Mead maximisation of `f` over ℝ³ starting from `x0`.
pub fn nelder_mead_max(
    f: impl Fn(&Vector3<f64>) -> f64,
    x0: Vector3<f64>,
    scale: f64,
    iters: usize,
) -> (Vector3<f64>, f64) {
    let g = |x: &Vector3<f64>| -f(x);
    let mut simplex: Vec<(Vector3<f64>, f64)> = vec![(x0, g(&x0))];
    for i in 0..3 {
        let mut x = x0;
        x[i] += scale;
        simplex.push((x, g(&x)));
    }
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[3].1 - simplex[0].1;
        let size = (1..4)
            .map(|i| (simplex[i].0 - simplex[0].0).norm())
            .fold(0.0, f64::max);
        if spread.abs() < 1e-15 && size < 1e-12 {
            break;
        }
        let centroid = (simplex[0].0 + simplex[1].0 + simplex[2].0) / 3.0;
        let worst = simplex[3];
        let xr = centroid + (centroid - worst.0);
        let fr = g(&xr);
        if fr < simplex[0].1 {
            let xe = centroid + 2.0 * (centroid - worst.0);
            let fe = g(&xe);
            simplex[3] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (xr, fr);
        } else {
            let xc = centroid + 0.5 * (worst.0 - centroid);
            let fc = g(&xc);
            if fc < worst.1 {
                simplex[3] = (xc, fc);
            } else {
                let best = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    s.0 = best + 0.5 * (s.0 - best);
                    s.1 = g(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0, -simplex[0].1)
}

/// Points on the unit sphere spread by the golden-angle spiral.
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vector3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        let a = Vector3::new(1.0, 0.0, 0.0);
        let b = Vector3::new(0.0, 2.0, 0.0);
        assert!((angle_between(&a, &b) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((angle_between(&a, &-a) - std::f64::consts::PI).abs() < 1e-15);
        let r = rotate_towards(&a, &b.normalize(), 0.3);
        assert!((angle_between(&a, &r) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn frame_is_orthonormal() {
        for n in fibonacci_sphere(50) {
            let (e1, e2) = orthonormal_frame(&n);
            assert!(e1.dot(&n).abs() < 1e-14 && e2.dot(&n).abs() < 1e-14);
            assert!((e1.norm() - 1.0).abs() < 1e-14 && (e2.norm() - 1.0).abs() < 1e-14);
            assert!((e1.cross(&e2) - n).norm() < 1e-14);
        }
    }

    #[test]
    fn minimisers() {
        let (t, v) = periodic_min(|t| -(t - 2.0).cos(), 32);
        assert!((t - 2.0).abs() < 1e-6 && (v + 1.0).abs() < 1e-12);
        let target = Vector3::new(0.1, -0.2, 0.3);
        let (x, _) = nelder_mead_max(|x| -(x - target).norm_squared(), Vector3::zeros(), 0.1, 500);
        assert!((x - target).norm() < 1e-6);
    }
}
