//! Seeded self-test: the invariants of every module re-checked on random
//! instances, plus one randomized trial per construction.
//!
//! Everything is driven by ChaCha8 generators derived from one seed, and the
//! report carries no timings, so two runs with the same seed and budget print
//! the same bytes. Every violation names the seed that reproduces it.

use std::fmt::Write as _;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ball_model::{
    ball_distance, boost_ball_action, cap_image, homology_through, hyperboloid_distance,
    lift_from_ball, lorentz_ball_action, shadow_parameter, BallPoint, Cap, Hyperboloid,
    SphereDirection,
};
use crate::charge::{
    exchange_statistics, verify_group_axioms, verify_group_axioms_exhaustive, ChargeGroup,
    Morphism, StatisticsCharacter,
};
use crate::constructions::{
    avoid_ball_inside, common_complement_cone, contracting_boosts, enclose_shadow, escape_ball,
    funnel_from_exhaustion, funnel_in, interval_direct, interval_five_term, path_connect,
    path_connect_in_complement, robust_enclosure_lorentz, shadow_certificate,
    shrink_across_shells, shrink_for_connectivity, spacelike_criterion, translate_enclosure,
    translation_certificate, wrap_ball_in_complement, LorentzNeighbourhood, ShrinkCase,
};
use crate::hypercone::{
    cone_leq, cone_leq_margin, disjoint, hyperball_disjoint_margin, hyperball_in_cone_margin,
    BallCone, Hyperball,
};
use crate::minkowski::{decompose_translation, kappa_split, lightlike_boost, FourVector, LorentzTransform};
use crate::sampling;
use crate::{Error, Result, Tolerances};

pub const LEMMAS: [&str; 13] = [
    "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11", "A12", "A13",
];

/// Pass counts and the smallest margin seen for one property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub worst_margin: Option<f64>,
    pub violations: Vec<String>,
}

impl PropertyResult {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: 0,
            total: 0,
            worst_margin: None,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, seed: u64, r: Result<f64>) {
        self.total += 1;
        match r {
            Ok(m) => {
                self.passed += 1;
                self.worst_margin = Some(self.worst_margin.map_or(m, |w| w.min(m)));
            }
            Err(e) => self.violations.push(format!("seed {seed}: {e}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub budget: usize,
    pub properties: Vec<PropertyResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.violations.is_empty())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "selftest seed={} budget={}", self.seed, self.budget);
        for p in &self.properties {
            let worst = p
                .worst_margin
                .filter(|m| m.is_finite())
                .map_or_else(|| "-".to_string(), |m| format!("{m:.3e}"));
            let _ = writeln!(
                s,
                "{:<44} {:>6}/{:<6} worst margin {}",
                p.name, p.passed, p.total, worst
            );
            for v in &p.violations {
                let _ = writeln!(s, "  violation {v}");
            }
        }
        let failed = self.properties.iter().filter(|p| !p.violations.is_empty()).count();
        if failed == 0 {
            let _ = writeln!(s, "result: PASS ({} properties)", self.properties.len());
        } else {
            let _ = writeln!(s, "result: FAIL ({failed} of {} properties)", self.properties.len());
        }
        s
    }
}

/// Independent seed for the `i`-th instance of a property.
pub fn sub_seed(seed: u64, tag: &str, i: usize) -> u64 {
    // splitmix64 over the seed, an FNV hash of the tag and the index
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fail(what: impl Into<String>) -> Error {
    Error::Numerical(what.into())
}

/// Samples interior points of `inner` and requires each to lie in `outer`.
pub fn sampled_inclusion<R: Rng + ?Sized>(
    inner: &BallCone,
    outer: &BallCone,
    rng: &mut R,
    n: usize,
) -> Result<()> {
    for _ in 0..n {
        let p = sampling::cone_interior(rng, inner);
        if !outer.contains(p.coords()) {
            return Err(fail(format!("sampled point {:?} escapes the outer cone", p.coords())));
        }
    }
    Ok(())
}

/// Samples interior points of each cone and requires them to miss the other.
pub fn sampled_separation<R: Rng + ?Sized>(
    k1: &BallCone,
    k2: &BallCone,
    rng: &mut R,
    n: usize,
) -> Result<()> {
    for (a, b) in [(k1, k2), (k2, k1)] {
        for _ in 0..n / 2 + 1 {
            let p = sampling::cone_interior(rng, a);
            if b.contains(p.coords()) {
                return Err(fail(format!("sampled point {:?} lies in both cones", p.coords())));
            }
        }
    }
    Ok(())
}

fn disjoint_margin(k1: &BallCone, k2: &BallCone) -> Option<f64> {
    match disjoint(k1, k2) {
        Ok(d) if d.is_disjoint() => Some(d.margin()),
        _ => None,
    }
}

fn random_disjoint_pair<R: Rng + ?Sized>(rng: &mut R, min_margin: f64) -> (BallCone, BallCone) {
    loop {
        let a = sampling::cone(rng, 5.0, 70.0);
        let b = sampling::cone(rng, 5.0, 70.0);
        if disjoint_margin(&a, &b).is_some_and(|m| m > min_margin) {
            return (a, b);
        }
    }
}

fn random_cone_missing<R: Rng + ?Sized>(rng: &mut R, k: &BallCone, min_margin: f64) -> BallCone {
    loop {
        let a = sampling::cone(rng, 5.0, 70.0);
        if disjoint_margin(&a, k).is_some_and(|m| m > min_margin) {
            return a;
        }
    }
}

/// Boost and rotation each of size at most `r`.
pub fn near_identity<R: Rng + ?Sized>(rng: &mut R, r: f64) -> LorentzTransform {
    let b = LorentzTransform::boost(&sampling::unit_vector(rng), rng.random_range(0.0..=r))
        .expect("unit direction");
    let q = LorentzTransform::rotation(&sampling::unit_vector(rng), rng.random_range(0.0..=r))
        .expect("unit axis");
    b.compose(&q)
}

fn unit_shell() -> Hyperboloid {
    Hyperboloid::new(1.0).expect("positive")
}

fn exhaustion_fixture() -> Vec<BallCone> {
    [-0.3, -0.6, -0.8, -0.9, -0.95, -0.975]
        .iter()
        .enumerate()
        .map(|(i, z)| {
            BallCone::from_parts([0.0, 0.0, *z], [0.0, 0.0, 1.0], 30.0 + 10.0 * i as f64)
                .expect("valid fixture")
        })
        .collect()
}

/// One randomized instance of a construction, certified by predicates and by
/// membership sampling with `budget` points. Returns the smallest certificate
/// margin.
pub fn lemma_trial(id: &str, seed: u64, budget: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = &mut rng;
    let shell = unit_shell();
    match id {
        "A1" => {
            let k = sampling::cone(rng, 5.0, 70.0);
            let probe = Hyperball::new(sampling::cone_interior(rng, &k), rng.random_range(0.05..1.0), shell)?;
            let depth = rng.random_range(2..=6);
            let f = funnel_in(&k, depth, &probe)?;
            check_funnel(&f.cones, Some(&k), Some(&probe), rng, budget)?;
            if f.cones.len() < depth {
                return Err(fail("funnel shorter than requested"));
            }
            Ok(f.probe_margin.unwrap_or(f64::INFINITY))
        }
        "A2" => {
            let l = sampling::lorentz(rng, 1.0);
            let ks = exhaustion_fixture()
                .iter()
                .map(|k| k.transform(&l))
                .collect::<Result<Vec<_>>>()?;
            let f = funnel_from_exhaustion(&ks)?;
            check_funnel(&f.cones, None, None, rng, budget)?;
            let mut worst = f64::INFINITY;
            for (o, k) in f.cones.iter().zip(&ks) {
                let m = disjoint_margin(o, k).ok_or_else(|| fail("opposite meets its member"))?;
                sampled_separation(o, k, rng, budget / ks.len())?;
                worst = worst.min(m);
            }
            Ok(worst)
        }
        "A3" => {
            let k = sampling::cone(rng, 5.0, 70.0);
            let o = Hyperball::new(sampling::ball_point(rng, 0.9), rng.random_range(0.05..1.0), shell)?;
            let k0 = avoid_ball_inside(&o, &k)?;
            // K itself is a valid answer when O already misses it, so the
            // inclusion is judged exactly and only the separation is scored
            let m = hyperball_disjoint_margin(&o, &k0);
            if !cone_leq(&k0, &k) || m <= 0.0 {
                return Err(fail(format!("witness fails its certificate (margin {m:e})")));
            }
            sampled_inclusion(&k0, &k, rng, budget / 2)?;
            for _ in 0..budget / 2 {
                let p = sampling::cone_interior(rng, &k0);
                if ball_distance(&p, &o.center, &shell) <= o.radius {
                    return Err(fail("sampled point of the witness lies in the hyperball"));
                }
            }
            Ok(m)
        }
        "A4" => {
            let k = sampling::cone(rng, 5.0, 70.0);
            let o = loop {
                let o = Hyperball::new(sampling::ball_point(rng, 0.9), rng.random_range(0.05..1.0), shell)?;
                if hyperball_disjoint_margin(&o, &k) > 1e-3 {
                    break o;
                }
            };
            let k0 = wrap_ball_in_complement(&o, &k)?;
            let inside = hyperball_in_cone_margin(&o, &k0);
            let sep = disjoint_margin(&k0, &k).ok_or_else(|| fail("witness meets K"))?;
            if inside <= 0.0 {
                return Err(fail("hyperball not inside the witness"));
            }
            for _ in 0..budget / 2 {
                let p = sampling::hyperball_point(rng, &o);
                if !k0.contains(p.coords()) {
                    return Err(fail("sampled hyperball point outside the witness"));
                }
            }
            sampled_separation(&k0, &k, rng, budget / 2)?;
            Ok(inside.min(sep))
        }
        "A5" => {
            let (ka, kb) = (sampling::cone(rng, 5.0, 70.0), sampling::cone(rng, 5.0, 70.0));
            let p = path_connect(&ka, &kb)?;
            check_path(&p.nodes, &p.witnesses, &ka, &kb, None, rng, budget)
        }
        "A6" => {
            let k = sampling::cone(rng, 5.0, 70.0);
            let ka = random_cone_missing(rng, &k, 1e-6);
            let kb = random_cone_missing(rng, &k, 1e-6);
            let p = path_connect_in_complement(&k, &ka, &kb)?;
            check_path(&p.nodes, &p.witnesses, &ka, &kb, Some(&k), rng, budget)
        }
        "A7" => {
            let (ka, kb) = (sampling::cone(rng, 5.0, 70.0), sampling::cone(rng, 5.0, 70.0));
            let r = shrink_for_connectivity(&ka, &kb)?;
            r.verify(&ka, &kb)?;
            sampled_inclusion(&r.cone, &ka, rng, budget / 2)?;
            let m = match r.case {
                ShrinkCase::DisjointCaps => {
                    sampled_separation(&r.cone, &kb, rng, budget / 2)?;
                    disjoint_margin(&r.cone, &kb).ok_or_else(|| fail("subcone meets Kb"))?
                }
                ShrinkCase::OverlappingCaps => {
                    sampled_inclusion(&r.cone, &kb, rng, budget / 2)?;
                    cone_leq_margin(&r.cone, &kb)
                }
            };
            Ok(m.min(cone_leq_margin(&r.cone, &ka)))
        }
        "A8" => {
            let (ka, kb) = random_disjoint_pair(rng, 1e-6);
            let c = common_complement_cone(&ka, &kb)?;
            let ma = disjoint_margin(&c, &ka).ok_or_else(|| fail("complement cone meets Ka"))?;
            let mb = disjoint_margin(&c, &kb).ok_or_else(|| fail("complement cone meets Kb"))?;
            sampled_separation(&c, &ka, rng, budget / 2)?;
            sampled_separation(&c, &kb, rng, budget / 2)?;
            Ok(ma.min(mb))
        }
        "A9" | "A10" => {
            let k = sampling::cone(rng, 5.0, 70.0);
            let sigma = rng.random_range(0.3..3.0);
            let tau = rng.random_range(0.3..3.0);
            if id == "A9" {
                let k0 = enclose_shadow(&k, sigma, tau)?;
                if !cone_leq(&k, &k0) {
                    return Err(fail("enclosure does not contain K"));
                }
                shadow_certificate(&k, &k0, sigma, tau, rng, budget)
            } else {
                let k0 = shrink_across_shells(&k, sigma, tau)?;
                if !cone_leq(&k0, &k) {
                    return Err(fail("subcone is not inside K"));
                }
                sampled_inclusion(&k0, &k, rng, budget / 4)?;
                shadow_certificate(&k0, &k, sigma, tau, rng, budget)
            }
        }
        "A11" => {
            let k = sampling::cone(rng, 5.0, 70.0);
            let cb = contracting_boosts(&k);
            let l = SphereDirection::unchecked(sampling::cap_direction(rng, k.base()));
            let mut prev = k;
            let mut worst = f64::INFINITY;
            for chi in [0.5, 1.0, 2.0] {
                let img = cb.image(&l, chi)?;
                if !cone_leq(&img, &k) || !cone_leq(&img, &prev) {
                    return Err(fail(format!("boost with rapidity {chi} does not contract K")));
                }
                sampled_inclusion(&img, &prev, rng, budget / 4)?;
                worst = worst.min(cone_leq_margin(&img, &k));
                prev = img;
            }
            let o = Hyperball::new(k.interior_point(), rng.random_range(0.05..=1.0), shell)?;
            let n = escape_ball(&k, &o, &l, 64)?;
            let b = cb.boost(&l, n as f64)?;
            for _ in 0..budget / 4 {
                let p = lorentz_ball_action(&b, &sampling::cone_interior(rng, &k));
                if ball_distance(&p, &o.center, &shell) <= o.radius {
                    return Err(fail(format!("boosted cone still meets the probe after {n} steps")));
                }
            }
            Ok(worst)
        }
        "A12" => {
            let k = sampling::cone(rng, 5.0, 70.0);
            let count = rng.random_range(0..=2);
            let gens: Vec<LorentzTransform> = (0..count).map(|_| near_identity(rng, 0.3)).collect();
            let eps = rng.random_range(0.002..0.02);
            let nbhd = LorentzNeighbourhood::new(gens, eps)?;
            let k0 = robust_enclosure_lorentz(&k, &nbhd)?;
            let words = nbhd.words();
            let per_word = (budget / words.len()).max(8);
            let mut worst = f64::INFINITY;
            for w in &words {
                let mut tried = 0;
                for _ in 0..8 {
                    let lam = w.compose(&near_identity(rng, eps / 4.0));
                    if w.distance(&lam) > eps {
                        continue;
                    }
                    tried += 1;
                    let img = k.transform(&lam)?;
                    if !cone_leq(&img, &k0) {
                        return Err(fail("a perturbed image escapes the enclosure"));
                    }
                    worst = worst.min(cone_leq_margin(&img, &k0));
                    for _ in 0..per_word / 8 {
                        let p = lorentz_ball_action(&lam, &sampling::cone_interior(rng, &k));
                        if !k0.contains(p.coords()) {
                            return Err(fail("a moved point escapes the enclosure"));
                        }
                    }
                }
                if tried == 0 {
                    return Err(fail("no perturbation sampled inside the neighbourhood"));
                }
            }
            Ok(worst)
        }
        "A13" => {
            let k = sampling::cone(rng, 5.0, 70.0);
            let tau = rng.random_range(0.5..2.0);
            let count = rng.random_range(1..=3);
            let ts: Vec<FourVector> = (0..count)
                .map(|_| {
                    let xs = sampling::unit_vector(rng) * rng.random_range(0.0..0.5);
                    FourVector::from_parts(xs.norm() + rng.random_range(0.0..0.5), xs)
                })
                .collect();
            let k0 = translate_enclosure(&k, tau, &ts)?;
            if !cone_leq(&k, &k0) {
                return Err(fail("enclosure does not contain K"));
            }
            translation_certificate(&k, &k0, tau, &ts, rng, budget.div_ceil(ts.len()))?;
            Ok(cone_leq_margin(&k, &k0))
        }
        _ => Err(Error::InvalidInput(format!("unknown lemma id {id}"))),
    }
}

fn check_funnel<R: Rng + ?Sized>(
    cones: &[BallCone],
    outer: Option<&BallCone>,
    probe: Option<&Hyperball>,
    rng: &mut R,
    budget: usize,
) -> Result<()> {
    let per = budget / cones.len().max(1) + 1;
    if let Some(k) = outer {
        if !cone_leq(&cones[0], k) {
            return Err(fail("first funnel cone is not inside K"));
        }
        sampled_inclusion(&cones[0], k, rng, per)?;
    }
    for w in cones.windows(2) {
        if !cone_leq(&w[1], &w[0]) {
            return Err(fail("funnel does not decrease"));
        }
        sampled_inclusion(&w[1], &w[0], rng, per)?;
    }
    if let (Some(o), Some(last)) = (probe, cones.last()) {
        if hyperball_disjoint_margin(o, last) <= 0.0 {
            return Err(fail("last funnel cone meets the probe"));
        }
        for _ in 0..per {
            let p = sampling::cone_interior(rng, last);
            if ball_distance(&p, &o.center, &o.shell) <= o.radius {
                return Err(fail("sampled point of the last cone lies in the probe"));
            }
        }
    }
    Ok(())
}

fn check_path<R: Rng + ?Sized>(
    nodes: &[BallCone],
    witnesses: &[BallCone],
    ka: &BallCone,
    kb: &BallCone,
    forbidden: Option<&BallCone>,
    rng: &mut R,
    budget: usize,
) -> Result<f64> {
    if nodes.first() != Some(ka) || nodes.last() != Some(kb) {
        return Err(fail("path endpoints do not match the inputs"));
    }
    if witnesses.len() + 1 != nodes.len() {
        return Err(fail("witness count does not match the nodes"));
    }
    let per = budget / (2 * witnesses.len() + nodes.len()).max(1) + 1;
    let mut worst = f64::INFINITY;
    for (i, w) in witnesses.iter().enumerate() {
        for node in [&nodes[i], &nodes[i + 1]] {
            let m = cone_leq_margin(w, node);
            if !cone_leq(w, node) {
                return Err(fail(format!("witness {i} is not inside its neighbour (margin {m:e})")));
            }
            sampled_inclusion(w, node, rng, per)?;
            worst = worst.min(m);
        }
    }
    if let Some(k) = forbidden {
        for (i, n) in nodes.iter().enumerate() {
            let m = disjoint_margin(n, k)
                .ok_or_else(|| fail(format!("node {i} meets the forbidden cone")))?;
            sampled_separation(n, k, rng, per)?;
            worst = worst.min(m);
        }
    }
    Ok(worst)
}

/// The axis-symmetric instance, a Lorentz-transported copy of it and the
/// degenerate instance of a construction.
pub fn lemma_fixture(id: &str, budget: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(0, id, 0));
    let rng = &mut rng;
    let shell = unit_shell();
    let sym = BallCone::from_parts([0.0; 3], [0.0, 0.0, 1.0], 30.0)?;
    let mirror = BallCone::from_parts([0.0; 3], [0.0, 0.0, -1.0], 30.0)?;
    let lam = LorentzTransform::boost(&Vector3::new(0.3, -0.2, 0.5).normalize(), 0.7)?;
    let sym_t = sym.transform(&lam)?;
    let mirror_t = mirror.transform(&lam)?;
    let on_axis = |z: f64, r: f64| -> Result<Hyperball> {
        Hyperball::new(BallPoint::new(Vector3::new(0.0, 0.0, z))?, r, shell)
    };
    let mut worst = f64::INFINITY;
    let mut note = |m: f64| worst = worst.min(m);
    match id {
        "A1" => {
            for (k, o) in [
                (sym, on_axis(0.5, 0.5)?),
                (sym_t, on_axis(0.5, 0.5)?.transform(&lam)),
            ] {
                let f = funnel_in(&k, 3, &o)?;
                check_funnel(&f.cones, Some(&k), Some(&o), rng, budget)?;
                note(f.probe_margin.unwrap_or(f64::INFINITY));
            }
            // a probe outside K is escaped by the first cone already
            let f = funnel_in(&sym, 1, &on_axis(-0.5, 0.2)?)?;
            if f.depth != 1 {
                return Err(fail("degenerate funnel is longer than one cone"));
            }
        }
        "A2" => {
            let ks = exhaustion_fixture();
            let f = funnel_from_exhaustion(&ks)?;
            check_funnel(&f.cones, None, None, rng, budget)?;
            let f = funnel_from_exhaustion(&ks[..1])?;
            note(disjoint_margin(&f.cones[0], &ks[0]).ok_or_else(|| fail("opposite meets K"))?);
        }
        "A3" => {
            for (k, o) in [
                (sym, on_axis(0.5, 0.5)?),
                (sym_t, on_axis(0.5, 0.5)?.transform(&lam)),
                (sym, on_axis(-0.5, 0.2)?),
            ] {
                let k0 = avoid_ball_inside(&o, &k)?;
                sampled_inclusion(&k0, &k, rng, budget)?;
                if !cone_leq(&k0, &k) {
                    return Err(fail("witness is not inside K"));
                }
                note(hyperball_disjoint_margin(&o, &k0));
            }
        }
        "A4" => {
            for (k, o) in [
                (sym, on_axis(-0.5, 0.3)?),
                (sym_t, on_axis(-0.5, 0.3)?.transform(&lam)),
            ] {
                let k0 = wrap_ball_in_complement(&o, &k)?;
                sampled_separation(&k0, &k, rng, budget)?;
                note(hyperball_in_cone_margin(&o, &k0));
            }
        }
        "A5" => {
            let p = path_connect(&sym, &sym)?;
            if p.nodes.len() != 1 {
                return Err(fail("path between equal cones has more than one node"));
            }
            for (a, b) in [(sym, mirror), (sym_t, mirror_t)] {
                let p = path_connect(&a, &b)?;
                note(check_path(&p.nodes, &p.witnesses, &a, &b, None, rng, budget)?);
            }
        }
        "A6" => {
            let side = BallCone::from_parts([0.0; 3], [1.0, 0.0, 0.0], 40.0)?;
            let side_t = side.transform(&lam)?;
            for (k, a, b) in [(side, sym, mirror), (side_t, sym_t, mirror_t)] {
                let p = path_connect_in_complement(&k, &a, &b)?;
                note(check_path(&p.nodes, &p.witnesses, &a, &b, Some(&k), rng, budget)?);
            }
            if path_connect_in_complement(&side, &sym, &sym)?.nodes.len() != 1 {
                return Err(fail("path between equal cones has more than one node"));
            }
        }
        "A7" => {
            for (a, b) in [(sym, mirror), (sym_t, mirror_t), (sym, sym)] {
                let r = shrink_for_connectivity(&a, &b)?;
                r.verify(&a, &b)?;
                sampled_inclusion(&r.cone, &a, rng, budget)?;
                note(cone_leq_margin(&r.cone, &a));
            }
        }
        "A8" => {
            for (a, b) in [(sym, mirror), (sym_t, mirror_t)] {
                let c = common_complement_cone(&a, &b)?;
                sampled_separation(&c, &a, rng, budget)?;
                sampled_separation(&c, &b, rng, budget)?;
                note(disjoint_margin(&c, &a).unwrap_or(-1.0).min(disjoint_margin(&c, &b).unwrap_or(-1.0)));
            }
        }
        "A9" => {
            for k in [sym, sym_t] {
                let k0 = enclose_shadow(&k, 1.0, 2.0)?;
                note(shadow_certificate(&k, &k0, 1.0, 2.0, rng, budget)?);
            }
            let k0 = enclose_shadow(&sym, 1.5, 1.5)?;
            note(shadow_certificate(&sym, &k0, 1.5, 1.5, rng, budget)?);
        }
        "A10" => {
            for k in [sym, sym_t] {
                let k0 = shrink_across_shells(&k, 1.0, 2.0)?;
                note(shadow_certificate(&k0, &k, 1.0, 2.0, rng, budget)?);
            }
            if shrink_across_shells(&sym, 1.5, 1.5)? != sym {
                return Err(fail("equal shells must return K"));
            }
        }
        "A11" => {
            for k in [sym, sym_t] {
                let cb = contracting_boosts(&k);
                let l = *k.base().axis();
                for chi in [1.0, 2.0, 3.0] {
                    let img = cb.image(&l, chi)?;
                    sampled_inclusion(&img, &k, rng, budget)?;
                    note(cone_leq_margin(&img, &k));
                }
            }
            let far = on_axis(-0.5, 0.2)?;
            if escape_ball(&sym, &far, sym.base().axis(), 8)? != 0 {
                return Err(fail("a disjoint probe needs no boosts"));
            }
        }
        "A12" => {
            let g = LorentzTransform::boost(&Vector3::x(), 0.2)?;
            for k in [sym, sym_t] {
                let k0 = robust_enclosure_lorentz(&k, &LorentzNeighbourhood::new(vec![g], 0.01)?)?;
                note(cone_leq_margin(&k, &k0));
            }
            let k0 = robust_enclosure_lorentz(&sym, &LorentzNeighbourhood::new(vec![], 1e-3)?)?;
            sampled_inclusion(&sym, &k0, rng, budget)?;
        }
        "A13" => {
            let t = [FourVector::new(1.0, 0.0, 0.0, 0.0)];
            for k in [sym, sym_t] {
                let k0 = translate_enclosure(&k, 1.0, &t)?;
                translation_certificate(&k, &k0, 1.0, &t, rng, budget)?;
                note(cone_leq_margin(&k, &k0));
            }
            if translate_enclosure(&sym, 1.0, &[FourVector::ZERO])? != sym {
                return Err(fail("zero translation must return K"));
            }
        }
        _ => return Err(Error::InvalidInput(format!("unknown lemma id {id}"))),
    }
    Ok(worst)
}

/// Largest `|ball_distance − hyperboloid_distance|` over `n` random pairs.
pub fn metric_deviation(seed: u64, n: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let tau = rng.random_range(0.1..=10.0);
        let h = Hyperboloid::new(tau)?;
        let u = sampling::ball_point(&mut rng, 0.95);
        let v = sampling::ball_point(&mut rng, 0.95);
        let d1 = ball_distance(&u, &v, &h);
        let d2 = hyperboloid_distance(&lift_from_ball(&u, &h), &lift_from_ball(&v, &h), &h)?;
        worst = worst.max((d1 - d2).abs());
    }
    Ok(worst)
}

/// Largest `|tanh c − |τ² − σ²|/(τ² + σ²)|` over `n` random pairs.
pub fn shadow_deviation(seed: u64, n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let sigma: f64 = rng.random_range(0.05..20.0);
            let tau: f64 = rng.random_range(0.05..20.0);
            let oracle = (tau * tau - sigma * sigma).abs() / (tau * tau + sigma * sigma);
            (shadow_parameter(sigma, tau).tanh() - oracle).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest disagreement of the closed-form boost action with the projective
/// action over `n` random `(l, χ ∈ [−3, 3], u)`.
pub fn boost_deviation(seed: u64, n: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let l = SphereDirection::unchecked(sampling::unit_vector(&mut rng));
        let chi = rng.random_range(-3.0..=3.0);
        let u = sampling::ball_point(&mut rng, 0.99);
        let a = boost_ball_action(&l, chi, &u);
        let b = lorentz_ball_action(&LorentzTransform::boost(l.vector(), chi)?, &u);
        worst = worst.max((a.coords() - b.coords()).norm());
    }
    Ok(worst)
}

/// Largest distance of mapped rim points from the fitted image circle, and
/// largest failure of the homology to be an involution, over `n` trials.
pub fn circle_deviation(seed: u64, n: usize) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut fit, mut inv): (f64, f64) = (0.0, 0.0);
    for _ in 0..n {
        let cap = Cap::new(
            SphereDirection::unchecked(sampling::unit_vector(&mut rng)),
            rng.random_range(0.05..3.0),
        )?;
        let lam = sampling::lorentz(&mut rng, 3.0);
        let img = cap_image(&lam, &cap)?;
        let c = img.half_angle().cos();
        for p in cap.boundary_samples(64) {
            let q = crate::ball_model::lorentz_sphere_action(&lam, &SphereDirection::unchecked(p));
            fit = fit.max((img.n().dot(q.vector()) - c).abs());
        }
        let u0 = sampling::ball_point(&mut rng, 0.9);
        let l = SphereDirection::unchecked(sampling::unit_vector(&mut rng));
        let back = homology_through(&u0, &homology_through(&u0, &l));
        inv = inv.max((back.vector() - l.vector()).norm());
    }
    Ok((fit, inv))
}

/// Largest `|direct − expanded|` interval difference over `n` random tuples.
pub fn interval_deviation(seed: u64, n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let tau = rng.random_range(0.1..5.0);
            let u = rng.random_range(0.05..=1.0);
            let up = rng.random_range(0.05..=1.0);
            let l = sampling::unit_vector(&mut rng);
            let lp = sampling::unit_vector(&mut rng);
            let t = rng.random_range(0.0..5.0);
            let d = interval_direct(u, up, &l, &lp, tau, t);
            let e = interval_five_term(u, up, &l, &lp, tau, t);
            (d - e).abs() / d.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Randomized search for a tuple meeting the spacelike criterion with
/// `l·l' < 0` but a non-negative interval. Returns the violations found.
pub fn spacelike_violations(seed: u64, n: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = 0;
    let mut tried = 0;
    while tried < n {
        let tau = rng.random_range(0.1..5.0);
        let t = rng.random_range(0.0..5.0);
        // u' small enough for u'τ + v(u') to exceed τ + t most of the time
        let up = rng.random_range(1e-3..=1.0);
        if !spacelike_criterion(up, tau, t) {
            continue;
        }
        let l = sampling::unit_vector(&mut rng);
        let mut lp = sampling::unit_vector(&mut rng);
        if l.dot(&lp) >= 0.0 {
            lp = -lp;
        }
        if l.dot(&lp) == 0.0 {
            continue;
        }
        tried += 1;
        let u = rng.random_range(1e-3..=1.0);
        if interval_direct(u, up, &l, &lp, tau, t) >= 0.0 {
            found += 1;
        }
    }
    found
}

/// Sampling oracle for `closure(K1) ⊆ closure(K2)`: rim generators and
/// interior points of `K1`, the apex included, must lie in the closure of
/// `K2`, read off the signed depth.
pub fn sampled_cone_leq<R: Rng + ?Sized>(
    k1: &BallCone,
    k2: &BallCone,
    rng: &mut R,
    tol: &Tolerances,
) -> bool {
    let within = |x: &Vector3<f64>| {
        // points on the sphere are judged by their direction against the cap
        if x.norm() >= 1.0 - 1e-12 {
            k2.base().contains(x) || crate::numeric::angle_between(x, k2.base().n()) <= k2.base().half_angle() + 1e-9
        } else {
            k2.depth(x) >= -1e-9
        }
    };
    if !within(k1.apex().coords()) {
        return false;
    }
    for i in 0..tol.boundary_samples {
        let th = std::f64::consts::TAU * i as f64 / tol.boundary_samples as f64;
        if !within(&k1.rim_point(th)) {
            return false;
        }
    }
    (0..tol.interior_samples).all(|_| within(sampling::cone_interior(rng, k1).coords()))
}

pub const DEFAULT_SEED: u64 = 20240601;
pub const DEFAULT_BUDGET: usize = 1000;

/// Runs every property with instance counts scaled from `budget`.
pub fn run(seed: u64, budget: usize, tol: &Tolerances) -> Result<SelftestReport> {
    tol.validate()?;
    let budget = budget.max(10);
    let mut props = Vec::new();

    let mut p = PropertyResult::new("metric: ball vs hyperboloid distance");
    let s = sub_seed(seed, "metric", 0);
    let limit = 1e3 * tol.linear;
    p.record(s, metric_deviation(s, budget).and_then(|d| {
        (d < limit).then_some(limit - d).ok_or_else(|| fail(format!("deviation {d:e}")))
    }));
    props.push(p);

    let mut p = PropertyResult::new("shadow: tanh c against the closed form");
    let s = sub_seed(seed, "shadow", 0);
    let d = shadow_deviation(s, budget);
    let limit = 1e2 * tol.linear;
    p.record(s, (d < limit).then_some(limit - d).ok_or_else(|| fail(format!("deviation {d:e}"))));
    props.push(p);

    let mut p = PropertyResult::new("boost: closed form vs projective action");
    let s = sub_seed(seed, "boost", 0);
    p.record(s, boost_deviation(s, budget).and_then(|d| {
        (d < limit).then_some(limit - d).ok_or_else(|| fail(format!("deviation {d:e}")))
    }));
    props.push(p);

    let mut p = PropertyResult::new("sphere action: circles and homology");
    let s = sub_seed(seed, "circle", 0);
    p.record(s, circle_deviation(s, budget / 10 + 1).and_then(|(fit, inv)| {
        let lim_inv = 1e4 * tol.linear;
        if fit < tol.fit_residual && inv < lim_inv {
            Ok((tol.fit_residual - fit).min(lim_inv - inv))
        } else {
            Err(fail(format!("fit residual {fit:e}, involution error {inv:e}")))
        }
    }));
    props.push(p);

    let mut p = PropertyResult::new("order: exact cone_leq vs sampling");
    for i in 0..budget / 10 + 1 {
        let s = sub_seed(seed, "order", i);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let a = sampling::cone(&mut rng, 5.0, 70.0);
        // half the pairs are nested by construction
        let b = if i % 2 == 0 {
            sampling::cone(&mut rng, 5.0, 70.0)
        } else {
            match shrink_for_connectivity(&a, &a) {
                Ok(r) => r.cone,
                Err(e) => {
                    p.record(s, Err(e));
                    continue;
                }
            }
        };
        let m = cone_leq_margin(&b, &a);
        if m.abs() < 1e-6 {
            continue;
        }
        let exact = cone_leq(&b, &a);
        let sampled = sampled_cone_leq(&b, &a, &mut rng, tol);
        // sampling can only miss a violation, never invent one
        let r = if exact && !sampled {
            Err(fail("sampling contradicts an exact inclusion"))
        } else if !exact && sampled && m < -1e-3 {
            Err(fail(format!("sampling misses a violation of size {m:e}")))
        } else {
            Ok(m.abs())
        };
        p.record(s, r);
    }
    props.push(p);

    let instances = (budget / 100).max(1);
    for id in LEMMAS {
        let mut p = PropertyResult::new(format!("construction {id}: fixtures"));
        p.record(0, lemma_fixture(id, budget));
        props.push(p);
        let mut p = PropertyResult::new(format!("construction {id}: random instances"));
        for i in 0..instances {
            let s = sub_seed(seed, id, i);
            p.record(s, lemma_trial(id, s, budget));
        }
        props.push(p);
    }

    let mut p = PropertyResult::new("interval: five-term expansion");
    let s = sub_seed(seed, "interval", 0);
    let d = interval_deviation(s, budget);
    let limit = 1e2 * tol.linear;
    p.record(s, (d < limit).then_some(limit - d).ok_or_else(|| fail(format!("deviation {d:e}"))));
    props.push(p);

    let mut p = PropertyResult::new("interval: spacelike criterion search");
    let s = sub_seed(seed, "spacelike", 0);
    let v = spacelike_violations(s, 10 * budget);
    p.record(s, (v == 0).then_some(f64::INFINITY).ok_or_else(|| fail(format!("{v} counterexamples"))));
    props.push(p);

    let mut p = PropertyResult::new("charge: group and character laws");
    let z = ChargeGroup::integers();
    let zz = ChargeGroup::new(1, vec![2, 2])?;
    let eps_z = StatisticsCharacter::new(&z, vec![-1])?;
    let eps_zz = StatisticsCharacter::new(&zz, vec![-1, 1, -1])?;
    let s = sub_seed(seed, "charge", 0);
    let checks = [
        verify_group_axioms_exhaustive(&z, &eps_z, 20),
        verify_group_axioms_exhaustive(&zz, &eps_zz, 3),
        verify_group_axioms(&zz, &eps_zz, budget, s),
    ];
    for r in checks {
        p.record(s, r.and_then(|rep| {
            if rep.passed() {
                Ok(f64::INFINITY)
            } else {
                Err(fail(rep.violations.join("; ")))
            }
        }));
    }
    let z3 = ChargeGroup::new(0, vec![3])?;
    p.record(s, match StatisticsCharacter::new(&z3, vec![-1]) {
        Err(_) => Ok(f64::INFINITY),
        Ok(_) => Err(fail("odd torsion accepted a fermionic sign")),
    });
    props.push(p);

    let mut p = PropertyResult::new("charge: exchange defined iff disjoint");
    for i in 0..budget / 20 + 1 {
        let s = sub_seed(seed, "exchange", i);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let a = sampling::cone(&mut rng, 5.0, 70.0);
        let b = sampling::cone(&mut rng, 5.0, 70.0);
        let g = z.element(&[rng.random_range(-5..=5)])?;
        let sa = Morphism::new(&z, g.clone(), a, unit_shell())?;
        let sb = Morphism::new(&z, g, b, unit_shell())?;
        let r = match (disjoint(&a, &b), exchange_statistics(&sa, &sb, &eps_z)) {
            (Ok(d), Ok(x)) if d.is_disjoint() => {
                if x.sign == eps_z.eval(&sa.charge)? {
                    Ok(d.margin())
                } else {
                    Err(fail("exchange sign differs from the character"))
                }
            }
            (Ok(d), Err(Error::Admissibility(_))) if !d.is_disjoint() => Ok(f64::INFINITY),
            (Err(e), _) if e.is_degenerate() => continue,
            (d, x) => Err(fail(format!("disjoint {d:?} but exchange {x:?}"))),
        };
        p.record(s, r);
    }
    props.push(p);

    let mut p = PropertyResult::new("exact: translations, kappa split, null boosts");
    p.record(0, exact_cases());
    props.push(p);

    Ok(SelftestReport {
        seed,
        budget,
        properties: props,
    })
}

/// Pinned small cases with exact rational answers.
pub fn exact_cases() -> Result<f64> {
    let fv = FourVector::new;
    let cases = [
        (fv(-1.0, 0.0, 0.0, 0.0), fv(0.0, 0.0, 0.0, 0.0), fv(1.0, 0.0, 0.0, 0.0)),
        (fv(0.0, 5.0, 0.0, 0.0), fv(5.0, 5.0, 0.0, 0.0), fv(5.0, 0.0, 0.0, 0.0)),
        (fv(3.0, 0.0, 0.0, 0.0), fv(3.0, 0.0, 0.0, 0.0), FourVector::ZERO),
    ];
    for (z, x, y) in cases {
        if decompose_translation(&z) != (x, y) {
            return Err(fail(format!("decompose_translation({z}) is off")));
        }
    }
    let kappas = [
        (fv(2.0, 1.0, 0.0, 0.0), fv(1.0, 1.0, 0.0, 0.0), 1.0),
        (fv(1.0, 0.0, 0.0, 0.0), FourVector::ZERO, 1.0),
        (fv(1.0, 0.0, 0.0, 2.0), fv(2.0, 0.0, 0.0, 2.0), -1.0),
    ];
    for (x, l, k) in kappas {
        if kappa_split(&x) != (l, k) {
            return Err(fail(format!("kappa_split({x}) is off")));
        }
    }
    let mut worst: f64 = 0.0;
    for (l, beta) in [
        (fv(1.0, 0.0, 0.0, 1.0), 1.0),
        (fv(1.0, 0.0, 0.0, 1.0), 2.0),
        (fv(1.0, 1.0, 0.0, 0.0), std::f64::consts::E),
    ] {
        let b = lightlike_boost(&l, beta)?;
        let lp = FourVector::from_parts(1.0, -l.xs);
        worst = worst
            .max((b.apply(&l) - (1.0 / beta) * l).max_abs())
            .max((b.apply(&lp) - beta * lp).max_abs());
    }
    if worst >= 1e-10 {
        return Err(fail(format!("null boost eigenrelations off by {worst:e}")));
    }
    Ok(1e-10 - worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_seeds_differ() {
        assert_ne!(sub_seed(1, "A1", 0), sub_seed(1, "A1", 1));
        assert_ne!(sub_seed(1, "A1", 0), sub_seed(1, "A2", 0));
        assert_eq!(sub_seed(7, "x", 3), sub_seed(7, "x", 3));
    }

    #[test]
    fn every_fixture_passes() {
        for id in LEMMAS {
            lemma_fixture(id, 200).unwrap_or_else(|e| panic!("{id}: {e}"));
        }
    }

    #[test]
    fn small_run_passes_and_repeats() {
        let a = run(5, 100, &Tolerances::DEFAULT).unwrap();
        assert!(a.passed(), "{}", a.render());
        let b = run(5, 100, &Tolerances::DEFAULT).unwrap();
        assert_eq!(a.render(), b.render());
    }

    #[test]
    fn corrupted_tolerances_fail() {
        let tol = Tolerances {
            linear: 0.0,
            ..Tolerances::DEFAULT
        };
        assert!(!run(5, 20, &tol).unwrap().passed());
    }
}
