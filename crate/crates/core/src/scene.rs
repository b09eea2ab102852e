//! Scene files: named cones, hyperballs, events and morphisms on one shell.
//!
//! The on-disk form is JSON with `"schema": 1`. Angles are degrees in the
//! file and radians everywhere else. Maps are ordered by name, so saving is
//! canonical and `load → save → load` reproduces the same objects.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ball_model::{BallPoint, Hyperboloid};
use crate::charge::{ChargeGroup, Morphism, StatisticsCharacter};
use crate::hypercone::{BallCone, Hyperball};
use crate::minkowski::FourVector;
use crate::{Error, Result};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub apex: [f64; 3],
    pub axis: [f64; 3],
    pub half_angle_deg: f64,
}

impl From<&BallCone> for ConeSpec {
    fn from(k: &BallCone) -> Self {
        let n = k.base().n();
        let a = k.apex().coords();
        Self {
            apex: [a.x, a.y, a.z],
            axis: [n.x, n.y, n.z],
            half_angle_deg: k.base().half_angle().to_degrees(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub free_rank: usize,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub charge: Vec<i64>,
    pub cone: String,
}

/// The file form, kept verbatim so that saving does not re-derive anything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub schema: u32,
    pub tau: f64,
    #[serde(default)]
    pub cones: BTreeMap<String, ConeSpec>,
    #[serde(default)]
    pub hyperballs: BTreeMap<String, BallSpec>,
    #[serde(default)]
    pub events: BTreeMap<String, [f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge_group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistics: Option<Vec<i8>>,
    #[serde(default)]
    pub morphisms: BTreeMap<String, MorphismSpec>,
}

/// A validated scene. Without a `charge_group` entry the group is `ℤ` with
/// trivial statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    file: SceneFile,
    pub shell: Hyperboloid,
    pub cones: BTreeMap<String, BallCone>,
    pub hyperballs: BTreeMap<String, Hyperball>,
    pub events: BTreeMap<String, FourVector>,
    pub group: ChargeGroup,
    pub statistics: StatisticsCharacter,
    pub morphisms: BTreeMap<String, Morphism>,
}

fn invalid(what: impl std::fmt::Display) -> Error {
    Error::InvalidInput(what.to_string())
}

impl Scene {
    pub fn empty(tau: f64) -> Result<Self> {
        Self::from_file(SceneFile {
            schema: SCHEMA,
            tau,
            cones: BTreeMap::new(),
            hyperballs: BTreeMap::new(),
            events: BTreeMap::new(),
            charge_group: None,
            statistics: None,
            morphisms: BTreeMap::new(),
        })
    }

    /// Parses and validates. Syntax errors carry `line:column`.
    pub fn parse(text: &str) -> Result<Self> {
        let file: SceneFile = serde_json::from_str(text).map_err(|e| {
            invalid(format!("scene parse error at line {} column {}: {e}", e.line(), e.column()))
        })?;
        Self::from_file(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::InvalidInput(m) => invalid(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_file(file: SceneFile) -> Result<Self> {
        if file.schema != SCHEMA {
            return Err(invalid(format!(
                "unsupported scene schema {} (expected {SCHEMA})",
                file.schema
            )));
        }
        let shell = Hyperboloid::new(file.tau)?;
        let mut cones = BTreeMap::new();
        for (name, c) in &file.cones {
            let k = BallCone::from_parts(c.apex, c.axis, c.half_angle_deg)
                .map_err(|e| invalid(format!("cone {name}: {e}")))?;
            cones.insert(name.clone(), k);
        }
        let mut hyperballs = BTreeMap::new();
        for (name, b) in &file.hyperballs {
            let o = BallPoint::try_from(b.center)
                .and_then(|c| Hyperball::new(c, b.radius, shell))
                .map_err(|e| invalid(format!("hyperball {name}: {e}")))?;
            hyperballs.insert(name.clone(), o);
        }
        let mut events = BTreeMap::new();
        for (name, x) in &file.events {
            let e = FourVector::from(*x);
            if !e.is_finite() {
                return Err(invalid(format!("event {name} is not finite")));
            }
            events.insert(name.clone(), e);
        }
        let group = match &file.charge_group {
            Some(g) => ChargeGroup::new(g.free_rank, g.torsion.clone())
                .map_err(|e| invalid(format!("charge_group: {e}")))?,
            None => ChargeGroup::integers(),
        };
        let statistics = match &file.statistics {
            Some(s) => StatisticsCharacter::new(&group, s.clone())
                .map_err(|e| invalid(format!("statistics: {e}")))?,
            None => StatisticsCharacter::trivial(&group),
        };
        let mut morphisms = BTreeMap::new();
        for (name, m) in &file.morphisms {
            let k = cones
                .get(&m.cone)
                .ok_or_else(|| invalid(format!("morphism {name}: unknown cone {}", m.cone)))?;
            let g = group
                .element(&m.charge)
                .map_err(|e| invalid(format!("morphism {name}: {e}")))?;
            morphisms.insert(name.clone(), Morphism::new(&group, g, *k, shell)?);
        }
        Ok(Self {
            file,
            shell,
            cones,
            hyperballs,
            events,
            group,
            statistics,
            morphisms,
        })
    }

    pub fn file(&self) -> &SceneFile {
        &self.file
    }

    /// Canonical text: pretty JSON, maps sorted by name, trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.file).expect("scene serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
    }

    pub fn cone(&self, name: &str) -> Result<&BallCone> {
        self.cones.get(name).ok_or_else(|| invalid(format!("unknown cone {name}")))
    }

    pub fn hyperball(&self, name: &str) -> Result<&Hyperball> {
        self.hyperballs
            .get(name)
            .ok_or_else(|| invalid(format!("unknown hyperball {name}")))
    }

    pub fn event(&self, name: &str) -> Result<&FourVector> {
        self.events.get(name).ok_or_else(|| invalid(format!("unknown event {name}")))
    }

    pub fn morphism(&self, name: &str) -> Result<&Morphism> {
        self.morphisms
            .get(name)
            .ok_or_else(|| invalid(format!("unknown morphism {name}")))
    }

    /// Name of a cone equal to `k`, if the scene has one.
    pub fn name_of(&self, k: &BallCone) -> Option<&str> {
        self.cones.iter().find(|(_, c)| *c == k).map(|(n, _)| n.as_str())
    }

    /// First `prefix_<n>`, `n ≥ 1`, not used by any cone.
    pub fn fresh_name(&self, prefix: &str) -> String {
        (1..)
            .map(|n| format!("{prefix}_{n}"))
            .find(|s| !self.file.cones.contains_key(s))
            .expect("unbounded")
    }

    /// Adds a cone as it would be read back from the file, so the stored
    /// object and a reload of the saved scene agree exactly.
    pub fn add_cone(&mut self, name: &str, k: &BallCone) -> Result<BallCone> {
        if self.file.cones.contains_key(name) {
            return Err(invalid(format!("cone {name} already exists")));
        }
        let spec = ConeSpec::from(k);
        let stored = BallCone::from_parts(spec.apex, spec.axis, spec.half_angle_deg)?;
        self.file.cones.insert(name.to_string(), spec);
        self.cones.insert(name.to_string(), stored);
        Ok(stored)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIRRORED: &str = r#"{
        "schema": 1,
        "tau": 1.0,
        "cones": {
            "A": {"apex": [0, 0, 0.2], "axis": [0, 0, 1], "half_angle_deg": 30},
            "B": {"apex": [0, 0, -0.2], "axis": [0, 0, -1], "half_angle_deg": 30}
        },
        "hyperballs": {"O": {"center": [0.5, 0, 0], "radius": 0.2}},
        "events": {"e": [2, 0, 0, 0.5]},
        "charge_group": {"free_rank": 1, "torsion": [2]},
        "statistics": [-1, 1],
        "morphisms": {"s": {"charge": [1, 1], "cone": "A"}}
    }"#;

    #[test]
    fn round_trip_is_exact() {
        let s = Scene::parse(MIRRORED).unwrap();
        let t = Scene::parse(&s.to_json()).unwrap();
        assert_eq!(s, t);
        assert_eq!(s.to_json(), t.to_json());
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = Scene::parse("{\n  \"schema\": 1,\n  \"tau\": ,\n}").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn unresolved_and_invalid_objects_are_rejected() {
        let bad = MIRRORED.replace("\"cone\": \"A\"", "\"cone\": \"Z\"");
        assert!(Scene::parse(&bad).unwrap_err().to_string().contains("unknown cone Z"));
        let bad = MIRRORED.replace("\"half_angle_deg\": 30}", "\"half_angle_deg\": 200}");
        assert!(Scene::parse(&bad).is_err());
        let bad = MIRRORED.replace("\"schema\": 1", "\"schema\": 2");
        assert!(Scene::parse(&bad).is_err());
        let bad = MIRRORED.replace("\"tau\": 1.0", "\"tau\": 1.0, \"extra\": 0");
        assert!(Scene::parse(&bad).is_err());
    }

    #[test]
    fn added_cones_survive_reload() {
        let mut s = Scene::parse(MIRRORED).unwrap();
        let k = s.cone("A").unwrap().transform(&crate::LorentzTransform::boost(
            &nalgebra::Vector3::new(1.0, 2.0, 0.5).normalize(),
            0.8,
        )
        .unwrap())
        .unwrap();
        let name = s.fresh_name("A8");
        assert_eq!(name, "A8_1");
        let stored = s.add_cone(&name, &k).unwrap();
        let t = Scene::parse(&s.to_json()).unwrap();
        assert_eq!(t.cone("A8_1").unwrap(), &stored);
        assert_eq!(s.fresh_name("A8"), "A8_2");
    }
}
