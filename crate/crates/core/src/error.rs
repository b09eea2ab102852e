use thiserror::Error;

/// Errors raised by geometric operations, constructions and the charge calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point is not on the hyperboloid with tau = {tau}: residual {residual:e}")]
    OffShell { tau: f64, residual: f64 },

    /// A predicate could not be decided because its margin fell inside the
    /// degeneracy window. Callers are expected to perturb their input.
    #[error("degenerate {predicate}: margin {margin:e} within ±{tolerance:e}")]
    Degenerate {
        predicate: &'static str,
        margin: f64,
        tolerance: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("construction {lemma} failed: {reason}")]
    ConstructionFailure { lemma: &'static str, reason: String },

    #[error("not admissible: {0}")]
    Admissibility(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no enclosing cone: {0}")]
    NoEnclosure(String),
}

impl Error {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::Degenerate { .. })
    }

    pub(crate) fn construction(lemma: &'static str, reason: impl Into<String>) -> Self {
        Error::ConstructionFailure {
            lemma,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
