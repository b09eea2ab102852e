//! Funnels and subcones avoiding or wrapping a hyperball.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::ball_model::{BallPoint, Cap, SphereDirection};
use crate::hypercone::{
    centering_boost, cone_leq, disjoint, hyperball_disjoint_margin, hyperball_in_cone_margin,
    ray_exit, BallCone, Hyperball,
};
use crate::numeric::angle_between;
use crate::support::{gjk, Convex, EuclideanBall};
use crate::{Error, Result, Tolerances};

/// Longest funnel produced while chasing a probe hyperball.
const MAX_FUNNEL: usize = 64;

/// A decreasing sequence of cones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Funnel {
    pub cones: Vec<BallCone>,
    pub depth: usize,
    /// Margin by which the last cone misses the probe, when one was given.
    pub probe_margin: Option<f64>,
}

impl Funnel {
    /// Re-checks `cones[n+1] ≤ cones[n]` and the probe margin.
    pub fn verify(&self, probe: Option<&Hyperball>) -> Result<()> {
        for (i, w) in self.cones.windows(2).enumerate() {
            if !cone_leq(&w[1], &w[0]) {
                return Err(Error::construction(
                    "funnel",
                    format!("cone {} is not inside cone {i}", i + 1),
                ));
            }
        }
        if let (Some(o), Some(last)) = (probe, self.cones.last()) {
            let m = hyperball_disjoint_margin(o, last);
            if m <= Tolerances::DEFAULT.margin {
                return Err(Error::construction(
                    "funnel",
                    format!("last cone meets the probe (margin {m:e})"),
                ));
            }
        }
        Ok(())
    }
}

/// Next cone of the funnel: apex halfway to the cap centre, cap halved.
fn shrink_step(k: &BallCone) -> Result<BallCone> {
    let n = *k.base().n();
    let a = *k.apex().coords();
    let psi = 0.5 * k.base().half_angle();
    let cap = Cap::new(SphereDirection::unchecked(n), psi)?;
    let mut t = 0.5;
    for _ in 0..40 {
        if let Ok(apex) = BallPoint::new(a + (n - a) * t) {
            if let Ok(next) = BallCone::new(apex, cap) {
                return Ok(next);
            }
        }
        t *= 0.5;
    }
    Err(Error::construction("A1", "no pointed shrink step found"))
}

/// A funnel inside `K` with at least `depth` cones whose last cone misses `probe`.
pub fn funnel_in(k: &BallCone, depth: usize, probe: &Hyperball) -> Result<Funnel> {
    let tol = Tolerances::DEFAULT;
    let mut cones = vec![shrink_step(k)?];
    loop {
        let last = *cones.last().expect("nonempty");
        let margin = hyperball_disjoint_margin(probe, &last);
        if cones.len() >= depth && margin > tol.margin {
            let f = Funnel {
                depth: cones.len(),
                cones,
                probe_margin: Some(margin),
            };
            if !cone_leq(&f.cones[0], k) {
                return Err(Error::construction("A1", "first cone is not inside K"));
            }
            f.verify(Some(probe))?;
            return Ok(f);
        }
        if cones.len() >= depth.max(1) + MAX_FUNNEL {
            return Err(Error::construction(
                "A1",
                format!("probe still met after {} cones (margin {margin:e})", cones.len()),
            ));
        }
        cones.push(shrink_step(&last)?);
    }
}

/// Opposite cones of an increasing sequence, certified to decrease and to be
/// disjoint from the corresponding members.
pub fn funnel_from_exhaustion(ks: &[BallCone]) -> Result<Funnel> {
    if ks.is_empty() {
        return Err(Error::InvalidInput("empty exhaustion".into()));
    }
    for (i, w) in ks.windows(2).enumerate() {
        if !cone_leq(&w[0], &w[1]) {
            return Err(Error::InvalidInput(format!(
                "exhaustion is not increasing at index {i}"
            )));
        }
    }
    let mut cones = Vec::with_capacity(ks.len());
    for (i, k) in ks.iter().enumerate() {
        let o = k.opposite()?;
        match disjoint(&o, k) {
            Ok(d) if d.is_disjoint() => {}
            Ok(_) => {
                return Err(Error::construction(
                    "A2",
                    format!("opposite of member {i} meets it"),
                ))
            }
            Err(e) => return Err(Error::construction("A2", format!("member {i}: {e}"))),
        }
        cones.push(o);
    }
    let f = Funnel {
        depth: cones.len(),
        cones,
        probe_margin: None,
    };
    f.verify(None)
        .map_err(|e| Error::construction("A2", format!("opposites do not decrease: {e}")))?;
    Ok(f)
}

/// A subcone of `K` disjoint from the hyperball `O`, with its apex pushed
/// along the axis generator towards the sphere.
pub fn avoid_ball_inside(o: &Hyperball, k: &BallCone) -> Result<BallCone> {
    let tol = Tolerances::DEFAULT;
    let n = *k.base().n();
    let a = *k.apex().coords();
    let psi = k.base().half_angle();
    let mut last = f64::NEG_INFINITY;
    for i in 1..=60 {
        let s = 1.0 - 0.5f64.powi(i);
        let apex_v = a + (n - a) * s;
        let Ok(apex) = BallPoint::new(apex_v) else {
            break;
        };
        let cap_angle = psi.min(0.5 * n.dot(&apex_v).clamp(-1.0, 1.0).acos());
        let Ok(cap) = Cap::new(SphereDirection::unchecked(n), cap_angle) else {
            continue;
        };
        let Ok(k0) = BallCone::new(apex, cap) else {
            continue;
        };
        last = hyperball_disjoint_margin(o, &k0);
        if last > tol.margin && cone_leq(&k0, k) {
            return Ok(k0);
        }
    }
    Err(Error::construction(
        "A3",
        format!("no subcone clears the hyperball (best margin {last:e})"),
    ))
}

/// A cone containing the hyperball `O` and disjoint from `K`, built as the
/// tangent cone to `O` from a point of a separating plane.
pub fn wrap_ball_in_complement(o: &Hyperball, k: &BallCone) -> Result<BallCone> {
    let tol = Tolerances::DEFAULT;
    let pre = hyperball_disjoint_margin(o, k);
    if pre <= tol.margin {
        return Err(Error::Admissibility(format!(
            "hyperball is not disjoint from the cone (margin {pre:e})"
        )));
    }
    let l = centering_boost(&o.center);
    let kp = k.transform(&l)?;
    let rho = o.centered_euclidean_radius();
    let ball = EuclideanBall {
        center: Vector3::zeros(),
        radius: rho,
    };
    let g = gjk(&ball, &kp);
    if g.distance <= 0.0 {
        return Err(Error::construction("A4", "no separating plane found"));
    }
    let w = (g.b - g.a) / g.distance;
    let far = -kp.support_value(&-w);
    if far <= rho {
        return Err(Error::construction(
            "A4",
            format!("separation gap {:e} is not positive", far - rho),
        ));
    }
    let c = 0.5 * (rho + far);
    let apex = w * c;
    // tangent half-angle, widened halfway towards a right angle
    let alpha = 0.5 * ((rho / c).asin() + FRAC_PI_2);
    let axis = -w;
    let (e1, _) = crate::numeric::orthonormal_frame(&axis);
    let ray = axis * alpha.cos() + e1 * alpha.sin();
    let q = ray_exit(&apex, &(apex + ray))
        .ok_or_else(|| Error::construction("A4", "degenerate tangent ray"))?;
    let beta = angle_between(&axis, &q);
    let kp0 = BallCone::new(
        BallPoint::new(apex)?,
        Cap::new(SphereDirection::unchecked(axis), beta)?,
    )?;
    let k0 = kp0.transform(&l.inverse())?;
    let inside = hyperball_in_cone_margin(o, &k0);
    if inside <= tol.margin {
        return Err(Error::construction(
            "A4",
            format!("hyperball not inside the witness (margin {inside:e})"),
        ));
    }
    match disjoint(&k0, k) {
        Ok(d) if d.is_disjoint() => Ok(k0),
        Ok(_) => Err(Error::construction("A4", "witness meets K")),
        Err(e) => Err(Error::construction("A4", e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Hyperboloid;

    fn shell() -> Hyperboloid {
        Hyperboloid::new(1.0).unwrap()
    }

    #[test]
    fn funnel_escapes_probe() {
        let k = BallCone::from_parts([0.0; 3], [0.0, 0.0, 1.0], 30.0).unwrap();
        let probe = Hyperball::new(k.interior_point(), 1.0, shell()).unwrap();
        let f = funnel_in(&k, 5, &probe).unwrap();
        assert!(f.depth >= 5);
        assert!(f.probe_margin.unwrap() > 0.0);
        f.verify(Some(&probe)).unwrap();
    }

    #[test]
    fn exhaustion_opposites() {
        // apexes run to the sphere faster than the caps open
        let zs = [-0.3, -0.6, -0.8, -0.9, -0.95, -0.975];
        let ks: Vec<BallCone> = zs
            .iter()
            .enumerate()
            .map(|(i, z)| {
                BallCone::from_parts([0.0, 0.0, *z], [0.0, 0.0, 1.0], 30.0 + 10.0 * i as f64)
                    .unwrap()
            })
            .collect();
        let f = funnel_from_exhaustion(&ks).unwrap();
        assert_eq!(f.cones.len(), ks.len());
    }

    #[test]
    fn opposites_of_growing_caps_on_one_apex_do_not_decrease() {
        let ks: Vec<BallCone> = (0..3)
            .map(|i| BallCone::from_parts([0.0; 3], [0.0, 0.0, 1.0], 20.0 + 10.0 * i as f64).unwrap())
            .collect();
        assert!(funnel_from_exhaustion(&ks).is_err());
    }

    #[test]
    fn subcone_avoiding_ball() {
        let k = BallCone::from_parts([0.0; 3], [0.0, 0.0, 1.0], 30.0).unwrap();
        let o = Hyperball::new(k.interior_point(), 0.5, shell()).unwrap();
        let k0 = avoid_ball_inside(&o, &k).unwrap();
        assert!(cone_leq(&k0, &k));
        assert!(hyperball_disjoint_margin(&o, &k0) > 0.0);
    }

    #[test]
    fn wrapping_ball() {
        let k = BallCone::from_parts([0.0; 3], [0.0, 0.0, 1.0], 30.0).unwrap();
        let o = Hyperball::new(BallPoint::new(Vector3::new(0.0, 0.0, -0.4)).unwrap(), 0.3, shell())
            .unwrap();
        let k0 = wrap_ball_in_complement(&o, &k).unwrap();
        assert!(hyperball_in_cone_margin(&o, &k0) > 0.0);
        assert!(disjoint(&k0, &k).unwrap().is_disjoint());
    }
}
