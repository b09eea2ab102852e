//! Interpolating paths of cones and cones in common complements.
//!
//! Paths are routed on the sphere: a chain of cap centres from one cone to
//! the other that keeps clear of the caps of the forbidden cones, densified
//! into thin cones ("needles") whose apexes sit close to the sphere. Adjacent
//! needles share a smaller needle in the overlap of their caps.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{find_needle, needle_in_both};
use crate::hypercone::{cone_leq, disjoint, BallCone};
use crate::numeric::{angle_between, fibonacci_sphere, orthonormal_frame, rotate_towards};
use crate::{Error, Result};

/// Largest cap half-angle used for path needles.
const EPS_MAX: f64 = 0.15;

/// Interpolating sequence with a common subcone for every adjacent pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConePath {
    pub nodes: Vec<BallCone>,
    pub witnesses: Vec<BallCone>,
}

impl ConePath {
    /// Re-checks every adjacency and that no node meets a forbidden cone.
    pub fn verify(&self, forbidden: &[BallCone]) -> Result<()> {
        if self.witnesses.len() + 1 != self.nodes.len() {
            return Err(Error::construction("path", "witness count does not match nodes"));
        }
        for (i, w) in self.witnesses.iter().enumerate() {
            if !cone_leq(w, &self.nodes[i]) || !cone_leq(w, &self.nodes[i + 1]) {
                return Err(Error::construction(
                    "path",
                    format!("witness {i} is not inside both neighbours"),
                ));
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            for f in forbidden {
                match disjoint(n, f) {
                    Ok(d) if d.is_disjoint() => {}
                    _ => {
                        return Err(Error::construction(
                            "path",
                            format!("node {i} is not disjoint from a forbidden cone"),
                        ))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn clearance(m: &Vector3<f64>, forbidden: &[BallCone]) -> f64 {
    forbidden
        .iter()
        .map(|f| angle_between(m, f.base().n()) - f.base().half_angle())
        .fold(f64::INFINITY, f64::min)
}

fn arc_clear(a: &Vector3<f64>, b: &Vector3<f64>, forbidden: &[BallCone], mu: f64) -> bool {
    let len = angle_between(a, b);
    let steps = (len / (0.25 * mu).max(1e-3)).ceil().max(1.0) as usize;
    (0..=steps).all(|i| {
        let p = rotate_towards(a, b, len * i as f64 / steps as f64);
        clearance(&p, forbidden) >= mu
    })
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Shortest chain of grid points from `a` to `b` keeping clearance `mu`.
fn grid_route(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    forbidden: &[BallCone],
    mu: f64,
) -> Option<Vec<Vector3<f64>>> {
    let spacing_target = 0.5 * mu;
    let n = ((4.0 * std::f64::consts::PI) / (spacing_target * spacing_target))
        .ceil()
        .clamp(2000.0, 40000.0) as usize;
    let spacing = (4.0 * std::f64::consts::PI / n as f64).sqrt();
    let reach = 2.2 * spacing;
    let mut pts = vec![*a, *b];
    pts.extend(fibonacci_sphere(n));
    let clear: Vec<f64> = pts.iter().map(|p| clearance(p, forbidden)).collect();
    let ok_edge = |i: usize, j: usize| {
        let len = angle_between(&pts[i], &pts[j]);
        len <= reach && clear[i].min(clear[j]) - 0.5 * len >= 0.5 * mu
    };
    // grid points are ordered by height, so neighbours lie in a window of indices
    let window = ((reach * n as f64) / 2.0).ceil() as usize + 2;
    let neighbours = |i: usize| -> Vec<usize> {
        let mut out = Vec::new();
        if i < 2 {
            for j in 2..pts.len() {
                if ok_edge(i, j) {
                    out.push(j);
                }
            }
        } else {
            let g = i - 2;
            let lo = g.saturating_sub(window);
            let hi = (g + window).min(n - 1);
            for h in lo..=hi {
                if h != g && ok_edge(i, h + 2) {
                    out.push(h + 2);
                }
            }
            for j in 0..2 {
                if ok_edge(i, j) {
                    out.push(j);
                }
            }
        }
        out
    };
    let mut dist = vec![f64::INFINITY; pts.len()];
    let mut prev = vec![usize::MAX; pts.len()];
    let mut heap = BinaryHeap::new();
    dist[0] = 0.0;
    heap.push(Entry(0.0, 0));
    while let Some(Entry(d, i)) = heap.pop() {
        if i == 1 {
            break;
        }
        if d > dist[i] {
            continue;
        }
        for j in neighbours(i) {
            let nd = d + angle_between(&pts[i], &pts[j]);
            if nd < dist[j] {
                dist[j] = nd;
                prev[j] = i;
                heap.push(Entry(nd, j));
            }
        }
    }
    if !dist[1].is_finite() {
        return None;
    }
    let mut route = vec![pts[1]];
    let mut i = 1;
    while prev[i] != usize::MAX {
        i = prev[i];
        route.push(pts[i]);
    }
    route.reverse();
    Some(route)
}

/// Walks from `a` away from the nearest forbidden cap until the clearance
/// reaches `target`. Each step is a quarter of the current clearance, so the
/// walk itself keeps three quarters of it.
fn escape(a: &Vector3<f64>, forbidden: &[BallCone], target: f64) -> Vec<Vector3<f64>> {
    let mut walk = vec![*a];
    let mut p = *a;
    for _ in 0..400 {
        let c = clearance(&p, forbidden);
        if c >= target {
            break;
        }
        let nearest = forbidden
            .iter()
            .min_by(|f, g| {
                let cf = angle_between(&p, f.base().n()) - f.base().half_angle();
                let cg = angle_between(&p, g.base().n()) - g.base().half_angle();
                cf.total_cmp(&cg)
            })
            .expect("a finite clearance needs a forbidden cone");
        let away = rotate_towards(&p, nearest.base().n(), -0.25 * c);
        if clearance(&away, forbidden) <= c {
            break;
        }
        p = away;
        walk.push(p);
    }
    walk
}

/// Cap centres along the route, spaced so that consecutive needles overlap.
fn densify(route: &[Vector3<f64>], forbidden: &[BallCone]) -> Vec<(Vector3<f64>, f64)> {
    let eps_at = |p: &Vector3<f64>| (0.5 * clearance(p, forbidden)).min(EPS_MAX);
    let mut out = vec![(route[0], eps_at(&route[0]))];
    for seg in route.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = angle_between(&a, &b);
        let mut s = 0.0;
        while s < len {
            let cur = rotate_towards(&a, &b, s);
            let step = 0.5 * eps_at(&cur);
            s = (s + step).min(len);
            let p = rotate_towards(&a, &b, s);
            out.push((p, eps_at(&p)));
        }
    }
    out
}

/// Interpolating path from `ka` to `kb` whose nodes avoid every forbidden cone.
pub fn path_connect_avoiding(
    forbidden: &[BallCone],
    ka: &BallCone,
    kb: &BallCone,
) -> Result<ConePath> {
    for (name, k) in [("first", ka), ("second", kb)] {
        for f in forbidden {
            match disjoint(k, f) {
                Ok(d) if d.is_disjoint() => {}
                _ => {
                    return Err(Error::Admissibility(format!(
                        "{name} endpoint is not disjoint from a forbidden cone"
                    )))
                }
            }
        }
    }
    if ka == kb {
        return Ok(ConePath {
            nodes: vec![*ka],
            witnesses: vec![],
        });
    }
    if let Some(w) = needle_in_both(ka, kb) {
        let p = ConePath {
            nodes: vec![*ka, *kb],
            witnesses: vec![w],
        };
        p.verify(forbidden)?;
        return Ok(p);
    }
    let (na, nb) = (*ka.base().n(), *kb.base().n());
    let mu = 0.5
        * clearance(&na, forbidden)
            .min(clearance(&nb, forbidden))
            .min(0.2);
    if mu <= 1e-6 {
        return Err(Error::construction("A6", "endpoint caps touch a forbidden cap"));
    }
    let route = if arc_clear(&na, &nb, forbidden, mu) {
        vec![na, nb]
    } else {
        let wa = escape(&na, forbidden, 0.4);
        let mut wb = escape(&nb, forbidden, 0.4);
        let (ea, eb) = (*wa.last().expect("nonempty"), *wb.last().expect("nonempty"));
        let mu = 0.5 * clearance(&ea, forbidden).min(clearance(&eb, forbidden)).min(0.2);
        let middle = if arc_clear(&ea, &eb, forbidden, mu) {
            vec![ea, eb]
        } else {
            grid_route(&ea, &eb, forbidden, mu)
                .ok_or_else(|| Error::construction("A6", "no clear route on the sphere"))?
        };
        wb.reverse();
        let mut r = wa;
        r.extend_from_slice(&middle[1..middle.len() - 1]);
        r.extend(wb);
        r
    };
    let accept_node = |n: &BallCone| {
        forbidden
            .iter()
            .all(|f| matches!(disjoint(n, f), Ok(d) if d.is_disjoint()))
    };
    let mut nodes = vec![*ka];
    for (m, eps) in densify(&route, forbidden) {
        let n = find_needle(&m, eps, accept_node).ok_or_else(|| {
            Error::construction("A5", format!("no needle found at cap centre {m:?}"))
        })?;
        nodes.push(n);
    }
    nodes.push(*kb);
    let mut witnesses = Vec::with_capacity(nodes.len() - 1);
    for (i, w) in nodes.windows(2).enumerate() {
        let c = needle_in_both(&w[0], &w[1])
            .ok_or_else(|| Error::construction("A5", format!("no common subcone at step {i}")))?;
        witnesses.push(c);
    }
    let p = ConePath { nodes, witnesses };
    p.verify(forbidden)?;
    Ok(p)
}

pub fn path_connect(ka: &BallCone, kb: &BallCone) -> Result<ConePath> {
    path_connect_avoiding(&[], ka, kb)
}

/// Path from `ka` to `kb` through cones disjoint from `k`.
pub fn path_connect_in_complement(k: &BallCone, ka: &BallCone, kb: &BallCone) -> Result<ConePath> {
    path_connect_avoiding(std::slice::from_ref(k), ka, kb)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShrinkCase {
    /// The caps of `Ka` and `Kb` are disjoint; the subcone is disjoint from `Kb`.
    DisjointCaps,
    /// The caps overlap; the subcone lies in `Ka ∩ Kb`.
    OverlappingCaps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkResult {
    pub cone: BallCone,
    pub case: ShrinkCase,
}

impl ShrinkResult {
    pub fn verify(&self, ka: &BallCone, kb: &BallCone) -> Result<()> {
        if !cone_leq(&self.cone, ka) {
            return Err(Error::construction("A7", "subcone is not inside Ka"));
        }
        let ok = match self.case {
            ShrinkCase::DisjointCaps => matches!(disjoint(&self.cone, kb), Ok(d) if d.is_disjoint()),
            ShrinkCase::OverlappingCaps => cone_leq(&self.cone, kb),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::construction("A7", "subcone fails its relation to Kb"))
        }
    }
}

/// A subcone `K0 ⊆ Ka` for which the cones disjoint from both `K0` and `Kb`
/// form a path connected family.
///
/// With disjoint caps `K0` is a needle disjoint from `Kb`; the complement of
/// two disjoint caps on the sphere is connected. With overlapping caps `K0`
/// lies in `Ka ∩ Kb`, so the family is that of cones disjoint from `Kb`.
pub fn shrink_for_connectivity(ka: &BallCone, kb: &BallCone) -> Result<ShrinkResult> {
    let gamma = angle_between(ka.base().n(), kb.base().n());
    let overlapping = gamma < ka.base().half_angle() + kb.base().half_angle();
    if overlapping {
        if let Some(c) = needle_in_both(ka, kb) {
            let r = ShrinkResult {
                cone: c,
                case: ShrinkCase::OverlappingCaps,
            };
            r.verify(ka, kb)?;
            return Ok(r);
        }
    }
    let na = *ka.base().n();
    let room = (gamma - kb.base().half_angle()).min(ka.base().half_angle());
    let eps0 = (0.5 * room).min(0.3);
    let c = find_needle(&na, eps0, |n| {
        cone_leq(n, ka) && matches!(disjoint(n, kb), Ok(d) if d.is_disjoint())
    })
    .ok_or_else(|| Error::construction("A7", "no needle inside Ka clears Kb"))?;
    let r = ShrinkResult {
        cone: c,
        case: ShrinkCase::DisjointCaps,
    };
    r.verify(ka, kb)?;
    Ok(r)
}

/// Sphere point of largest clearance from the given cones' caps.
fn clearest_direction(cones: &[BallCone]) -> (Vector3<f64>, f64) {
    let mut cands = fibonacci_sphere(2000);
    if cones.len() == 2 {
        let (n1, n2) = (cones[0].base().n(), cones[1].base().n());
        let (p1, p2) = (cones[0].base().half_angle(), cones[1].base().half_angle());
        let gamma = angle_between(n1, n2);
        cands.push(rotate_towards(n1, n2, 0.5 * (p1 + gamma - p2)));
        cands.push(rotate_towards(n1, n2, -0.5 * (p1 + (std::f64::consts::TAU - gamma) - p2)));
    }
    let mut best = cands
        .iter()
        .map(|c| (*c, clearance(c, cones)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("candidates");
    let mut step: f64 = 0.05;
    for _ in 0..60 {
        let (e1, e2) = orthonormal_frame(&best.0);
        let mut moved = false;
        for k in 0..8 {
            let th = std::f64::consts::TAU * k as f64 / 8.0;
            let dir = e1 * th.cos() + e2 * th.sin();
            let p = (best.0 * step.cos() + dir * step.sin()).normalize();
            let c = clearance(&p, cones);
            if c > best.1 {
                best = (p, c);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best
}

/// A cone disjoint from both of two disjoint cones.
pub fn common_complement_cone(ka: &BallCone, kb: &BallCone) -> Result<BallCone> {
    match disjoint(ka, kb) {
        Ok(d) if d.is_disjoint() => {}
        Ok(_) => return Err(Error::Admissibility("cones are not disjoint".into())),
        Err(e) => return Err(Error::Admissibility(e.to_string())),
    }
    let pair = [*ka, *kb];
    let (m, clear) = clearest_direction(&pair);
    if clear <= 4e-6 {
        return Err(Error::construction(
            "A8",
            format!("caps leave no room on the sphere (clearance {clear:e})"),
        ));
    }
    let accept = |n: &BallCone| {
        pair.iter()
            .all(|k| matches!(disjoint(n, k), Ok(d) if d.is_disjoint()))
    };
    find_needle(&m, (0.5 * clear).min(0.3), accept)
        .ok_or_else(|| Error::construction("A8", "no needle clears both cones"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(apex: [f64; 3], axis: [f64; 3], deg: f64) -> BallCone {
        BallCone::from_parts(apex, axis, deg).unwrap()
    }

    #[test]
    fn trivial_and_overlapping_paths() {
        let a = cone([0.0; 3], [0.0, 0.0, 1.0], 20.0);
        assert_eq!(path_connect(&a, &a).unwrap().len(), 1);
        let b = cone([0.1, 0.0, 0.0], [0.3, 0.0, 1.0], 20.0);
        let p = path_connect(&a, &b).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn long_path() {
        let a = cone([0.0; 3], [0.0, 0.0, 1.0], 20.0);
        let b = cone([0.2, 0.0, 0.0], [0.0, 0.0, -1.0], 15.0);
        let p = path_connect(&a, &b).unwrap();
        assert!(p.len() > 2);
        assert_eq!(p.nodes[0], a);
        assert_eq!(*p.nodes.last().unwrap(), b);
    }

    #[test]
    fn path_around_forbidden_cone() {
        let k = cone([0.0; 3], [1.0, 0.0, 0.0], 40.0);
        let a = cone([0.0, 0.0, 0.3], [0.0, 0.0, 1.0], 15.0);
        let b = cone([0.0, 0.0, -0.3], [0.0, 0.0, -1.0], 15.0);
        let p = path_connect_in_complement(&k, &a, &b).unwrap();
        p.verify(&[k]).unwrap();
        // the direct arc between the poles passes through +x or not; either way
        // every node must avoid K
        assert!(p.len() > 2);
    }

    #[test]
    fn shrink_cases() {
        let a = cone([0.0; 3], [0.0, 0.0, 1.0], 30.0);
        let b = cone([0.0; 3], [1.0, 0.0, 0.0], 30.0);
        let r = shrink_for_connectivity(&a, &b).unwrap();
        assert_eq!(r.case, ShrinkCase::DisjointCaps);
        let c = cone([0.0; 3], [0.5, 0.0, 1.0], 30.0);
        let r = shrink_for_connectivity(&a, &c).unwrap();
        assert_eq!(r.case, ShrinkCase::OverlappingCaps);
    }

    #[test]
    fn common_complement() {
        let a = cone([0.0; 3], [0.0, 0.0, 1.0], 30.0);
        let b = cone([0.0; 3], [0.0, 0.0, -1.0], 30.0);
        let c = common_complement_cone(&a, &b).unwrap();
        assert!(disjoint(&c, &a).unwrap().is_disjoint());
        assert!(disjoint(&c, &b).unwrap().is_disjoint());
    }
}
