use serde::{Deserialize, Serialize};

/// Every numerical threshold used by the library, in one record.
///
/// The defaults are what the test-suite pins; a record can be loaded from a
/// JSON file (see the `--tolerances` flag of the command line tool) and any
/// field left out keeps its default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute tolerance for linear identities (sums, projections).
    pub linear: f64,
    /// Absolute tolerance for matrix identities such as `mᵀ η m = η`.
    pub matrix: f64,
    /// Relative tolerance for a four-vector to count as lying on a time-shell.
    pub shell: f64,
    /// Window below 1 inside which `cosh⁻¹` arguments are clamped.
    pub acosh_clamp: f64,
    /// Largest admissible residual when refitting a circle on the sphere.
    pub fit_residual: f64,
    /// Predicates whose margin lies inside `±margin` are reported degenerate.
    pub margin: f64,
    /// Minimal signed distance of a cone apex below its base plane.
    pub pointed: f64,
    /// Smallest admissible cap half-angle (radians).
    pub min_half_angle: f64,
    /// Angular gap kept away from the full sphere by enclosing caps (radians).
    pub cap_gap: f64,
    /// Boundary sampling budget of the predicate engine.
    pub boundary_samples: usize,
    /// Interior sampling budget of the predicate engine.
    pub interior_samples: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        linear: 1e-12,
        matrix: 1e-10,
        shell: 1e-9,
        acosh_clamp: 1e-12,
        fit_residual: 1e-7,
        margin: 1e-9,
        pointed: 1e-10,
        min_half_angle: 1e-6,
        cap_gap: 1e-3,
        boundary_samples: 64,
        interior_samples: 256,
    };

    pub fn from_json(text: &str) -> crate::Result<Self> {
        let tol: Tolerances = serde_json::from_str(text)
            .map_err(|e| crate::Error::InvalidInput(format!("tolerances: {e}")))?;
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> crate::Result<()> {
        let reals = [
            ("linear", self.linear),
            ("matrix", self.matrix),
            ("shell", self.shell),
            ("acosh_clamp", self.acosh_clamp),
            ("fit_residual", self.fit_residual),
            ("margin", self.margin),
            ("pointed", self.pointed),
            ("min_half_angle", self.min_half_angle),
            ("cap_gap", self.cap_gap),
        ];
        for (name, v) in reals {
            if !v.is_finite() || v < 0.0 {
                return Err(crate::Error::InvalidInput(format!(
                    "tolerance {name} must be a finite non-negative number, got {v}"
                )));
            }
        }
        if self.boundary_samples < 4 {
            return Err(crate::Error::InvalidInput(
                "boundary_samples must be at least 4".into(),
            ));
        }
        Ok(())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
