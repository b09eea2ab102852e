//! The eleven acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL` line (shown with `--nocapture`) before asserting.

use std::time::Instant;

use hypercone::ball_model::{
    ball_distance, boost_ball_action, homology_through, shadow_radius, BallPoint, Hyperboloid,
    SphereDirection,
};
use hypercone::charge::{
    exchange_statistics, verify_group_axioms_exhaustive, ChargeGroup, Morphism, StatisticsCharacter,
};
use hypercone::constructions::{
    common_complement_cone, contracting_boosts, escape_ball, interval_direct, interval_five_term,
};
use hypercone::hypercone::{cone_leq, disjoint, Hyperball};
use hypercone::minkowski::{decompose_translation, kappa_split, lightlike_boost, FourVector};
use hypercone::selftest::{self, sub_seed, LEMMAS};
use hypercone::{sampling, Error, Tolerances};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0xACCE_57ED;

fn verdict(n: u32, name: &str, failures: &[String], detail: String) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {n} ({name}): {status}, {detail}");
    assert!(failures.is_empty(), "criterion {n} ({name}) failed:\n{}", failures.join("\n"));
}

fn bp(x: f64, y: f64, z: f64) -> BallPoint {
    BallPoint::new(Vector3::new(x, y, z)).unwrap()
}

#[test]
fn criterion_01_metric_consistency() {
    let worst = selftest::metric_deviation(sub_seed(SEED, "metric", 0), 10_000).unwrap();
    let pinned = ball_distance(&BallPoint::origin(), &bp(0.6, 0.0, 0.0), &Hyperboloid::new(1.0).unwrap());
    let mut f = Vec::new();
    if worst >= 1e-9 {
        f.push(format!("max deviation {worst:e}"));
    }
    if (pinned - 2f64.ln()).abs() > 1e-12 {
        f.push(format!("d(0, 0.6 e1) = {pinned}"));
    }
    verdict(1, "metric consistency", &f, format!("max deviation {worst:.2e} over 10^4 pairs"));
}

#[test]
fn criterion_02_shadow_oracle() {
    let worst = selftest::shadow_deviation(sub_seed(SEED, "shadow", 0), 1_000);
    let r = shadow_radius(1.0, 2.0).unwrap();
    let o = Hyperball::new(BallPoint::origin(), r, Hyperboloid::new(2.0).unwrap()).unwrap();
    let mut f = Vec::new();
    if worst > 1e-10 {
        f.push(format!("max deviation {worst:e}"));
    }
    if (r - 2.0 * 2f64.ln()).abs() > 1e-12 {
        f.push(format!("hyperbolic radius {r}"));
    }
    if (o.centered_euclidean_radius() - 0.6).abs() > 1e-12 {
        f.push(format!("Euclidean radius {}", o.centered_euclidean_radius()));
    }
    verdict(2, "shadow oracle", &f, format!("max deviation {worst:.2e} over 10^3 pairs"));
}

#[test]
fn criterion_03_boost_formula() {
    let worst = selftest::boost_deviation(sub_seed(SEED, "boost", 0), 10_000).unwrap();
    let mut f = Vec::new();
    if worst > 1e-10 {
        f.push(format!("max deviation {worst:e}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..100 {
        let l = SphereDirection::new(sampling::unit_vector(&mut rng)).unwrap();
        let chi: f64 = rng.random_range(-3.0..=3.0);
        let img = boost_ball_action(&l, chi, &BallPoint::origin());
        let err = (img.coords() - l.vector() * chi.tanh()).norm();
        if err > 1e-12 {
            f.push(format!("origin image off by {err:e} at chi = {chi}"));
        }
    }
    verdict(3, "boost formula", &f, format!("max deviation {worst:.2e} over 10^4 triples"));
}

#[test]
fn criterion_04_circle_preservation() {
    let (fit, inv) = selftest::circle_deviation(sub_seed(SEED, "circle", 0), 1_000).unwrap();
    let h = homology_through(&bp(0.0, 0.0, 0.5), &SphereDirection::new(Vector3::x()).unwrap());
    let pinned = (h.vector() - Vector3::new(-0.6, 0.0, 0.8)).norm();
    let mut f = Vec::new();
    if fit >= 1e-7 {
        f.push(format!("fit residual {fit:e}"));
    }
    if inv >= 1e-8 {
        f.push(format!("involution error {inv:e}"));
    }
    if pinned > 1e-10 {
        f.push(format!("pinned homology off by {pinned:e}"));
    }
    verdict(4, "circle preservation", &f, format!("fit residual {fit:.2e}, involution error {inv:.2e}"));
}

#[test]
fn criterion_05_lemma_certificates() {
    const INSTANCES: usize = 100;
    const BUDGET: usize = 10_000;
    let results: Vec<(&str, Vec<String>, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = LEMMAS
            .iter()
            .map(|id| {
                s.spawn(move || {
                    let mut fails = Vec::new();
                    let mut worst = f64::INFINITY;
                    match selftest::lemma_fixture(id, BUDGET) {
                        Ok(m) => worst = worst.min(m),
                        Err(e) => fails.push(format!("{id} fixtures: {e}")),
                    }
                    for i in 0..INSTANCES {
                        let seed = sub_seed(SEED, id, i);
                        match selftest::lemma_trial(id, seed, BUDGET) {
                            Ok(m) => worst = worst.min(m),
                            Err(e) => fails.push(format!("{id} seed {seed}: {e}")),
                        }
                    }
                    (*id, fails, worst)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("no panic")).collect()
    });
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for (id, fails, worst) in results {
        println!("  {id}: {}/{} instances certified, worst margin {worst:.3e}", INSTANCES + 1 - fails.len(), INSTANCES + 1);
        summary.push(id);
        failures.extend(fails);
    }
    verdict(
        5,
        "lemma certificates",
        &failures,
        format!("{} constructions x ({INSTANCES} random + fixtures) at budget {BUDGET}", summary.len()),
    );
}

#[test]
fn criterion_06_contraction() {
    let mut f = Vec::new();
    let mut max_steps = 0;
    for i in 0..100 {
        let seed = sub_seed(SEED, "contraction", i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = sampling::cone(&mut rng, 5.0, 70.0);
        let cb = contracting_boosts(&k);
        let l = SphereDirection::new(sampling::cap_direction(&mut rng, k.base())).unwrap();
        for chi in [0.5, 1.0, 2.0] {
            match cb.image(&l, chi) {
                Ok(img) if cone_leq(&img, &k) => {}
                Ok(_) => f.push(format!("seed {seed}: image at chi {chi} not inside K")),
                Err(e) => f.push(format!("seed {seed}: {e}")),
            }
        }
        let o = Hyperball::new(k.interior_point(), rng.random_range(0.05..=1.0), Hyperboloid::new(1.0).unwrap()).unwrap();
        match escape_ball(&k, &o, &l, 64) {
            Ok(n) => max_steps = max_steps.max(n),
            Err(e) => f.push(format!("seed {seed}: escape_ball: {e}")),
        }
    }
    verdict(6, "contraction", &f, format!("100 cones, escape needed at most {max_steps} steps"));
}

#[test]
fn criterion_07_interval_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(SEED, "interval", 0));
    let mut worst: f64 = 0.0;
    for _ in 0..1_000 {
        let tau = rng.random_range(0.1..5.0);
        let u = rng.random_range(0.05..=1.0);
        let up = rng.random_range(0.05..=1.0);
        let l = sampling::unit_vector(&mut rng);
        let lp = sampling::unit_vector(&mut rng);
        let t = rng.random_range(0.0..5.0);
        worst = worst.max((interval_direct(u, up, &l, &lp, tau, t) - interval_five_term(u, up, &l, &lp, tau, t)).abs());
    }
    let found = selftest::spacelike_violations(sub_seed(SEED, "spacelike", 0), 100_000);
    let mut f = Vec::new();
    if worst > 1e-10 {
        f.push(format!("expansion off by {worst:e}"));
    }
    if found > 0 {
        f.push(format!("{found} counterexamples to the spacelike criterion"));
    }
    verdict(7, "interval identity", &f, format!("max difference {worst:.2e}, 0 of 10^5 searches violate"));
}

#[test]
fn criterion_08_charge_calculus() {
    let mut f = Vec::new();
    let z = ChargeGroup::integers();
    let zz = ChargeGroup::new(1, vec![2, 2]).unwrap();
    let mut checks = 0;
    for (g, signs, bound) in [(&z, vec![-1], 20), (&z, vec![1], 20), (&zz, vec![-1, 1, -1], 5), (&zz, vec![1, -1, 1], 5)] {
        let eps = StatisticsCharacter::new(g, signs).unwrap();
        let r = verify_group_axioms_exhaustive(g, &eps, bound).unwrap();
        checks += r.checks;
        f.extend(r.violations);
        for a in g.elements_within(bound) {
            let e = eps.eval(&a).unwrap();
            if e * e != 1 || eps.eval(&g.neg(&a).unwrap()).unwrap() != e {
                f.push(format!("character law fails at {:?}", a.coords()));
            }
        }
    }
    for torsion in [vec![3], vec![2, 5]] {
        let g = ChargeGroup::new(0, torsion.clone()).unwrap();
        let mut signs = vec![1; torsion.len()];
        *signs.last_mut().unwrap() = -1;
        if StatisticsCharacter::new(&g, signs).is_ok() {
            f.push(format!("odd torsion {torsion:?} accepted a fermionic sign"));
        }
    }
    verdict(8, "charge calculus", &f, format!("{checks} exhaustive triples"));
}

#[test]
fn criterion_09_cross_module() {
    let mut f = Vec::new();
    let z = ChargeGroup::integers();
    let eps = StatisticsCharacter::new(&z, vec![-1]).unwrap();
    let shell = Hyperboloid::new(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(SEED, "cross", 0));
    let (mut pairs, mut overlapping) = (0, 0);
    while pairs < 200 {
        let a = sampling::cone(&mut rng, 5.0, 70.0);
        let b = sampling::cone(&mut rng, 5.0, 70.0);
        let g = z.element(&[rng.random_range(-5..=5)]).unwrap();
        let s = Morphism::new(&z, g.clone(), a, shell).unwrap();
        let t = Morphism::new(&z, g, b, shell).unwrap();
        let d = match disjoint(&a, &b) {
            Ok(d) => d,
            Err(e) if e.is_degenerate() => continue,
            Err(e) => panic!("{e}"),
        };
        let x = exchange_statistics(&s, &t, &eps);
        if d.is_disjoint() {
            pairs += 1;
            match common_complement_cone(&a, &b) {
                Ok(c) => {
                    for k in [&a, &b] {
                        if !disjoint(&c, k).map(|d| d.is_disjoint()).unwrap_or(false) {
                            f.push(format!("pair {pairs}: complement cone meets an input"));
                        }
                    }
                }
                Err(e) => f.push(format!("pair {pairs}: common_complement_cone: {e}")),
            }
            if let Err(e) = x {
                f.push(format!("pair {pairs}: exchange undefined on a disjoint pair: {e}"));
            }
        } else {
            overlapping += 1;
            if !matches!(x, Err(Error::Admissibility(_))) {
                f.push(format!("exchange defined on an overlapping pair: {x:?}"));
            }
        }
    }
    verdict(9, "cross-module guarantee", &f, format!("200 disjoint pairs, {overlapping} overlapping pairs rejected"));
}

#[test]
fn criterion_10_exact_cases() {
    let fv = FourVector::new;
    let mut f = Vec::new();
    let dec = [
        (fv(-1.0, 0.0, 0.0, 0.0), (FourVector::ZERO, fv(1.0, 0.0, 0.0, 0.0))),
        (fv(0.0, 5.0, 0.0, 0.0), (fv(5.0, 5.0, 0.0, 0.0), fv(5.0, 0.0, 0.0, 0.0))),
        (fv(3.0, 0.0, 0.0, 0.0), (fv(3.0, 0.0, 0.0, 0.0), FourVector::ZERO)),
    ];
    for (z, want) in dec {
        if decompose_translation(&z) != want {
            f.push(format!("decompose_translation({z}) = {:?}", decompose_translation(&z)));
        }
    }
    let kap = [
        (fv(2.0, 1.0, 0.0, 0.0), (fv(1.0, 1.0, 0.0, 0.0), 1.0)),
        (fv(1.0, 0.0, 0.0, 0.0), (FourVector::ZERO, 1.0)),
        (fv(1.0, 0.0, 0.0, 2.0), (fv(2.0, 0.0, 0.0, 2.0), -1.0)),
    ];
    for (x, want) in kap {
        if kappa_split(&x) != want {
            f.push(format!("kappa_split({x}) = {:?}", kappa_split(&x)));
        }
    }
    let b = lightlike_boost(&fv(1.0, 0.0, 0.0, 1.0), 2.0).unwrap();
    let e1 = (b.apply(&fv(1.0, 0.0, 0.0, 1.0)) - fv(0.5, 0.0, 0.0, 0.5)).max_abs();
    let e2 = (b.apply(&fv(1.0, 0.0, 0.0, -1.0)) - fv(2.0, 0.0, 0.0, -2.0)).max_abs();
    let e3 = (b.matrix()[(0, 0)] - 1.25).abs();
    let id = lightlike_boost(&fv(1.0, 0.0, 0.0, 1.0), 1.0).unwrap();
    let e4 = (id.matrix() - nalgebra::Matrix4::identity()).abs().max();
    let worst = e1.max(e2).max(e3).max(e4);
    if worst > 1e-10 {
        f.push(format!("lightlike_boost eigenrelations off by {worst:e}"));
    }
    if let Err(e) = selftest::exact_cases() {
        f.push(e.to_string());
    }
    verdict(10, "exact small cases", &f, format!("eigenrelation error {worst:.2e}"));
}

#[test]
fn criterion_11_selftest_budget_and_determinism() {
    let start = Instant::now();
    let a = selftest::run(selftest::DEFAULT_SEED, selftest::DEFAULT_BUDGET, &Tolerances::DEFAULT).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let b = selftest::run(selftest::DEFAULT_SEED, selftest::DEFAULT_BUDGET, &Tolerances::DEFAULT).unwrap();
    let mut f = Vec::new();
    if !a.passed() {
        f.push(a.render());
    }
    if secs >= 60.0 {
        f.push(format!("took {secs:.1} s"));
    }
    if a.render() != b.render() {
        f.push("two runs with one seed differ".into());
    }
    verdict(11, "self-test budget and determinism", &f, format!("{secs:.1} s, reports identical"));
}
