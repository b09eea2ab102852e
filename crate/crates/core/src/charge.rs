//! Simple charge classes: a finitely generated abelian group of labels, a
//! statistics character on it, and morphisms carrying a label together with
//! the cone they are localized in.
//!
//! Only the data that survives to the classification is modelled; there is no
//! operator content. Admissibility of compositions, exchanges and intertwiners
//! is decided by the geometric predicates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ball_model::Hyperboloid;
use crate::constructions::{
    common_complement_cone, path_connect, path_connect_in_complement, translate_enclosure,
    translation_certificate, ConePath,
};
use crate::hypercone::{disjoint, enclosing_cone, BallCone};
use crate::minkowski::FourVector;
use crate::{Error, Result};

/// `ℤ^free_rank ⊕ ℤ_{m₁} ⊕ … ⊕ ℤ_{m_k}`; coordinates list the free part first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChargeGroup {
    free_rank: usize,
    torsion_orders: Vec<u64>,
}

impl ChargeGroup {
    pub fn new(free_rank: usize, torsion_orders: Vec<u64>) -> Result<Self> {
        if let Some(m) = torsion_orders.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidInput(format!(
                "torsion orders must be at least 2, got {m}"
            )));
        }
        Ok(Self {
            free_rank,
            torsion_orders,
        })
    }

    pub fn integers() -> Self {
        Self::new(1, vec![]).expect("valid")
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_orders(&self) -> &[u64] {
        &self.torsion_orders
    }

    /// Number of generators, free and torsion.
    pub fn rank(&self) -> usize {
        self.free_rank + self.torsion_orders.len()
    }

    /// Element with the given coordinates, torsion entries reduced.
    pub fn element(&self, coords: &[i64]) -> Result<ChargeElement> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidInput(format!(
                "charge needs {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        let mut c = coords.to_vec();
        self.reduce(&mut c);
        Ok(ChargeElement { coords: c })
    }

    pub fn zero(&self) -> ChargeElement {
        ChargeElement {
            coords: vec![0; self.rank()],
        }
    }

    fn reduce(&self, c: &mut [i64]) {
        for (x, &m) in c[self.free_rank..].iter_mut().zip(&self.torsion_orders) {
            *x = x.rem_euclid(m as i64);
        }
    }

    fn check(&self, g: &ChargeElement) -> Result<()> {
        let reduced = g.coords.len() == self.rank()
            && g.coords[self.free_rank..]
                .iter()
                .zip(&self.torsion_orders)
                .all(|(&x, &m)| (0..m as i64).contains(&x));
        if reduced {
            Ok(())
        } else {
            Err(Error::Domain(format!("{g:?} is not an element of {self:?}")))
        }
    }

    pub fn add(&self, g: &ChargeElement, h: &ChargeElement) -> Result<ChargeElement> {
        self.check(g)?;
        self.check(h)?;
        let mut c: Vec<i64> = g.coords.iter().zip(&h.coords).map(|(a, b)| a + b).collect();
        self.reduce(&mut c);
        Ok(ChargeElement { coords: c })
    }

    /// The conjugate class `ḡ = −g`.
    pub fn neg(&self, g: &ChargeElement) -> Result<ChargeElement> {
        self.check(g)?;
        let mut c: Vec<i64> = g.coords.iter().map(|a| -a).collect();
        self.reduce(&mut c);
        Ok(ChargeElement { coords: c })
    }

    /// A random element with free coordinates in `[-bound, bound]`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> ChargeElement {
        let mut c: Vec<i64> = (0..self.free_rank)
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        c.extend(self.torsion_orders.iter().map(|&m| rng.random_range(0..m as i64)));
        ChargeElement { coords: c }
    }

    /// All elements with free coordinates in `[-bound, bound]`.
    pub fn elements_within(&self, bound: i64) -> Vec<ChargeElement> {
        let mut out = vec![vec![]];
        for i in 0..self.rank() {
            let range: Vec<i64> = if i < self.free_rank {
                (-bound..=bound).collect()
            } else {
                (0..self.torsion_orders[i - self.free_rank] as i64).collect()
            };
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    range.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(|coords| ChargeElement { coords }).collect()
    }
}

/// Coordinates of a charge class; torsion residues are kept reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChargeElement {
    coords: Vec<i64>,
}

impl ChargeElement {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// A homomorphism `ε` from the group to `{±1}`, given by its value on each
/// generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatisticsCharacter {
    group: ChargeGroup,
    signs: Vec<i8>,
}

impl StatisticsCharacter {
    /// Rejects signs other than ±1 and a sign −1 on a generator of odd order,
    /// where `ε(m g) = ε(0) = 1` would fail.
    pub fn new(group: &ChargeGroup, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != group.rank() {
            return Err(Error::InvalidInput(format!(
                "character needs {} signs, got {}",
                group.rank(),
                signs.len()
            )));
        }
        if let Some(s) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput(format!("sign must be ±1, got {s}")));
        }
        for (i, &m) in group.torsion_orders.iter().enumerate() {
            if m % 2 == 1 && signs[group.free_rank + i] == -1 {
                return Err(Error::InvalidInput(format!(
                    "generator of odd order {m} cannot carry sign -1"
                )));
            }
        }
        Ok(Self {
            group: group.clone(),
            signs,
        })
    }

    /// All generators bosonic.
    pub fn trivial(group: &ChargeGroup) -> Self {
        Self {
            group: group.clone(),
            signs: vec![1; group.rank()],
        }
    }

    pub fn group(&self) -> &ChargeGroup {
        &self.group
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn eval(&self, g: &ChargeElement) -> Result<i8> {
        self.group.check(g)?;
        let odd = self
            .signs
            .iter()
            .zip(&g.coords)
            .filter(|(&s, &c)| s == -1 && c.rem_euclid(2) == 1)
            .count();
        Ok(if odd % 2 == 0 { 1 } else { -1 })
    }
}

/// A localized morphism reduced to its charge, its cone and the shell the
/// cone lives on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Morphism {
    pub group: ChargeGroup,
    pub charge: ChargeElement,
    pub localization: BallCone,
    pub shell: Hyperboloid,
}

impl Morphism {
    pub fn new(
        group: &ChargeGroup,
        charge: ChargeElement,
        localization: BallCone,
        shell: Hyperboloid,
    ) -> Result<Self> {
        group.check(&charge)?;
        Ok(Self {
            group: group.clone(),
            charge,
            localization,
            shell,
        })
    }

    fn same_frame(&self, other: &Morphism) -> Result<()> {
        if self.group != other.group {
            return Err(Error::Domain("morphisms carry different charge groups".into()));
        }
        if self.shell != other.shell {
            return Err(Error::Domain(format!(
                "morphisms live on different shells (tau {} and {})",
                self.shell.tau(),
                other.shell.tau()
            )));
        }
        Ok(())
    }
}

/// Result of composing two morphisms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Composite {
    /// Both cones fit in one cone, which localizes the product.
    Localized(Morphism),
    /// The product exists but no single cone of the family contains both
    /// localizations.
    Unlocalized {
        group: ChargeGroup,
        charge: ChargeElement,
        cones: [BallCone; 2],
        shell: Hyperboloid,
    },
}

impl Composite {
    pub fn charge(&self) -> &ChargeElement {
        match self {
            Composite::Localized(m) => &m.charge,
            Composite::Unlocalized { charge, .. } => charge,
        }
    }

    pub fn is_localized(&self) -> bool {
        matches!(self, Composite::Localized(_))
    }
}

pub fn compose(s: &Morphism, t: &Morphism) -> Result<Composite> {
    s.same_frame(t)?;
    let charge = s.group.add(&s.charge, &t.charge)?;
    Ok(match enclosing_cone(&s.localization, &t.localization) {
        Some(k) => Composite::Localized(Morphism {
            group: s.group.clone(),
            charge,
            localization: k,
            shell: s.shell,
        }),
        None => Composite::Unlocalized {
            group: s.group.clone(),
            charge,
            cones: [s.localization, t.localization],
            shell: s.shell,
        },
    })
}

/// Same localization, conjugate charge.
pub fn conjugate(s: &Morphism) -> Morphism {
    Morphism {
        charge: s.group.neg(&s.charge).expect("morphism charges are reduced"),
        ..s.clone()
    }
}

/// Statistics sign of a pair of morphisms of the same class localized in
/// disjoint cones, with the cone in their common complement that makes the
/// exchange well defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub sign: i8,
    pub complement: BallCone,
}

pub fn exchange_statistics(
    s: &Morphism,
    t: &Morphism,
    eps: &StatisticsCharacter,
) -> Result<Exchange> {
    s.same_frame(t)?;
    if s.charge != t.charge {
        return Err(Error::Domain(format!(
            "exchange needs one charge class, got {:?} and {:?}",
            s.charge.coords, t.charge.coords
        )));
    }
    if eps.group != s.group {
        return Err(Error::Domain("character is defined on another group".into()));
    }
    let d = disjoint(&s.localization, &t.localization)?;
    if !d.is_disjoint() {
        return Err(Error::Admissibility(
            "localizations are not spacelike separated".into(),
        ));
    }
    let complement = common_complement_cone(&s.localization, &t.localization)?;
    Ok(Exchange {
        sign: eps.eval(&s.charge)?,
        complement,
    })
}

/// A cone containing both localizations, where an intertwiner between the
/// two morphisms can be localized.
pub fn intertwiner_region(s: &Morphism, t: &Morphism) -> Result<BallCone> {
    s.same_frame(t)?;
    if s.charge != t.charge {
        return Err(Error::Domain(format!(
            "intertwiners need one charge class, got {:?} and {:?}",
            s.charge.coords, t.charge.coords
        )));
    }
    enclosing_cone(&s.localization, &t.localization).ok_or_else(|| {
        Error::NoEnclosure(
            "the localizations have no common enclosing cone; shrink one of them with \
             shrink_for_connectivity and transport along a path instead"
                .into(),
        )
    })
}

/// Chain of cones transporting the localization of `s` to `target`, avoiding
/// `forbidden` when given.
pub fn transport_chain(
    s: &Morphism,
    target: &BallCone,
    forbidden: Option<&BallCone>,
) -> Result<ConePath> {
    match forbidden {
        Some(k) => path_connect_in_complement(k, &s.localization, target),
        None => path_connect(&s.localization, target),
    }
}

/// A morphism re-localized in the frame of the shifted light cone `V − t₀`.
///
/// `cone` is a cone on the shell with `C(localization) + t₀ ⊆ C(cone)`, so
/// the original region lies in the hypercone `C(cone) − t₀` of `V − t₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedMorphism {
    pub morphism: Morphism,
    pub cone: BallCone,
    pub shift: FourVector,
}

pub fn shift_light_cone(s: &Morphism, t0: &FourVector) -> Result<ShiftedMorphism> {
    let cone = translate_enclosure(&s.localization, s.shell.tau(), std::slice::from_ref(t0))?;
    Ok(ShiftedMorphism {
        morphism: s.clone(),
        cone,
        shift: *t0,
    })
}

impl ShiftedMorphism {
    /// Samples events of the original hypercone and checks their translates.
    pub fn certify(&self, seed: u64, budget: usize) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        translation_certificate(
            &self.morphism.localization,
            &self.cone,
            self.morphism.shell.tau(),
            std::slice::from_ref(&self.shift),
            &mut rng,
            budget,
        )
    }
}

/// Violations found while checking the group and character laws.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: usize,
    pub violations: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_triple(
    g: &ChargeGroup,
    eps: &StatisticsCharacter,
    a: &ChargeElement,
    b: &ChargeElement,
    c: &ChargeElement,
    report: &mut AxiomReport,
) -> Result<()> {
    let zero = g.zero();
    let ab = g.add(a, b)?;
    let mut fail = |what: &str| {
        report
            .violations
            .push(format!("{what} fails at {:?}, {:?}, {:?}", a.coords, b.coords, c.coords))
    };
    if ab != g.add(b, a)? {
        fail("commutativity");
    }
    if g.add(&ab, c)? != g.add(a, &g.add(b, c)?)? {
        fail("associativity");
    }
    if g.add(a, &zero)? != *a {
        fail("identity");
    }
    let na = g.neg(a)?;
    if !g.add(a, &na)?.is_zero() || g.neg(&na)? != *a {
        fail("inverse");
    }
    let (ea, eb) = (eps.eval(a)?, eps.eval(b)?);
    if eps.eval(&ab)? != ea * eb {
        fail("multiplicativity of the character");
    }
    if eps.eval(&na)? != ea || ea * ea != 1 {
        fail("conjugation invariance of the character");
    }
    if eps.eval(&zero)? != 1 {
        fail("vacuum statistics");
    }
    report.checks += 1;
    Ok(())
}

/// Randomized check of the abelian group laws, conjugation as inverse and the
/// character laws `ε(g + h) = ε(g)ε(h)`, `ε(ḡ) = ε(g)`, `ε² = 1`.
pub fn verify_group_axioms(
    g: &ChargeGroup,
    eps: &StatisticsCharacter,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport::default();
    for _ in 0..trials {
        let a = g.random_element(&mut rng, 1000);
        let b = g.random_element(&mut rng, 1000);
        let c = g.random_element(&mut rng, 1000);
        check_triple(g, eps, &a, &b, &c, &mut report)?;
    }
    Ok(report)
}

/// The same laws on every triple with free coordinates in `[-bound, bound]`.
pub fn verify_group_axioms_exhaustive(
    g: &ChargeGroup,
    eps: &StatisticsCharacter,
    bound: i64,
) -> Result<AxiomReport> {
    let all = g.elements_within(bound);
    let mut report = AxiomReport::default();
    for a in &all {
        for b in &all {
            for c in &all {
                check_triple(g, eps, a, b, c, &mut report)?;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shell() -> Hyperboloid {
        Hyperboloid::new(1.0).unwrap()
    }

    fn cone(apex: [f64; 3], axis: [f64; 3], deg: f64) -> BallCone {
        BallCone::from_parts(apex, axis, deg).unwrap()
    }

    fn morphism(g: &ChargeGroup, c: &[i64], k: BallCone) -> Morphism {
        Morphism::new(g, g.element(c).unwrap(), k, shell()).unwrap()
    }

    #[test]
    fn conjugates() {
        let z = ChargeGroup::integers();
        let k = cone([0.0; 3], [0.0, 0.0, 1.0], 20.0);
        let s = morphism(&z, &[0], k);
        assert_eq!(conjugate(&s), s);
        let s = morphism(&z, &[1], k);
        assert_eq!(conjugate(&s).charge.coords(), &[-1]);
        assert!(compose(&s, &conjugate(&s)).unwrap().charge().is_zero());
        let z2 = ChargeGroup::new(0, vec![2]).unwrap();
        let s = morphism(&z2, &[1], k);
        assert_eq!(conjugate(&s).charge.coords(), &[1]);
    }

    #[test]
    fn composition_localization() {
        let z = ChargeGroup::integers();
        let a = cone([0.0; 3], [0.0, 0.0, 1.0], 10.0);
        let tilted = [20f64.to_radians().sin(), 0.0, 20f64.to_radians().cos()];
        let b = cone([0.0; 3], tilted, 10.0);
        let c = compose(&morphism(&z, &[1], a), &morphism(&z, &[2], b)).unwrap();
        assert!(c.is_localized());
        assert_eq!(c.charge().coords(), &[3]);
        let up = cone([0.0, 0.0, -0.5], [0.0, 0.0, 1.0], 100.0);
        let down = cone([0.0, 0.0, 0.5], [0.0, 0.0, -1.0], 100.0);
        let c = compose(&morphism(&z, &[1], up), &morphism(&z, &[-1], down)).unwrap();
        assert!(!c.is_localized());
        assert!(c.charge().is_zero());
    }

    #[test]
    fn statistics_examples() {
        let z = ChargeGroup::integers();
        let eps = StatisticsCharacter::new(&z, vec![-1]).unwrap();
        assert_eq!(eps.eval(&z.element(&[3]).unwrap()).unwrap(), -1);
        assert_eq!(eps.eval(&z.zero()).unwrap(), 1);
        let z3 = ChargeGroup::new(0, vec![3]).unwrap();
        assert!(StatisticsCharacter::new(&z3, vec![-1]).is_err());
        let a = cone([0.0; 3], [0.0, 0.0, 1.0], 20.0);
        let b = cone([0.0; 3], [0.0, 0.0, -1.0], 20.0);
        let x = exchange_statistics(&morphism(&z, &[3], a), &morphism(&z, &[3], b), &eps).unwrap();
        assert_eq!(x.sign, -1);
        let e = exchange_statistics(&morphism(&z, &[3], a), &morphism(&z, &[2], b), &eps);
        assert!(matches!(e, Err(Error::Domain(_))));
        let e = exchange_statistics(&morphism(&z, &[3], a), &morphism(&z, &[3], a), &eps);
        assert!(matches!(e, Err(Error::Admissibility(_))));
    }

    #[test]
    fn intertwiner_regions() {
        let z = ChargeGroup::integers();
        let a = cone([0.0; 3], [0.0, 0.0, 1.0], 20.0);
        let outer = cone([0.0, 0.0, -0.2], [0.0, 0.0, 1.0], 40.0);
        assert_eq!(intertwiner_region(&morphism(&z, &[1], a), &morphism(&z, &[1], a)).unwrap(), a);
        assert_eq!(
            intertwiner_region(&morphism(&z, &[1], a), &morphism(&z, &[1], outer)).unwrap(),
            outer
        );
        let up = cone([0.0, 0.0, -0.5], [0.0, 0.0, 1.0], 100.0);
        let down = cone([0.0, 0.0, 0.5], [0.0, 0.0, -1.0], 100.0);
        let e = intertwiner_region(&morphism(&z, &[1], up), &morphism(&z, &[1], down)).unwrap_err();
        assert!(e.to_string().contains("shrink_for_connectivity"));
    }

    #[test]
    fn axioms_hold() {
        let z = ChargeGroup::integers();
        let eps = StatisticsCharacter::new(&z, vec![-1]).unwrap();
        assert!(verify_group_axioms(&z, &eps, 1000, 3).unwrap().passed());
        let g = ChargeGroup::new(1, vec![2]).unwrap();
        let eps = StatisticsCharacter::new(&g, vec![1, -1]).unwrap();
        assert!(verify_group_axioms_exhaustive(&g, &eps, 4).unwrap().passed());
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let z = ChargeGroup::integers();
        let s = morphism(&z, &[1], cone([0.0; 3], [0.0, 0.0, 1.0], 20.0));
        let sh = shift_light_cone(&s, &FourVector::ZERO).unwrap();
        assert_eq!(sh.cone, s.localization);
        let sh = shift_light_cone(&s, &FourVector::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        sh.certify(1, 200).unwrap();
    }
}
