//! Causal geometry of hypercones inside the forward light cone.
//!
//! The crate is organised bottom-up:
//!
//! - [`minkowski`]: four-vectors, proper orthochronous Lorentz maps and the
//!   semigroup of Poincaré transformations mapping the light cone into itself.
//! - [`ball_model`]: hyperboloid time-shells, their Beltrami–Klein ball image,
//!   hyperbolic distances, causal shadows and the induced Lorentz actions on the
//!   ball and on the celestial sphere.
//! - [`hypercone`]: cones over spherical caps in the ball, hyperballs, and the
//!   order / separation predicates between them, all reporting margins.
//! - [`constructions`]: constructive witnesses for the topological facts about
//!   hypercones (funnels, interpolating paths, enclosures across shells, under
//!   boosts and under translations).
//! - [`charge`]: the calculus of simple charge classes, whose admissibility
//!   conditions are the geometric predicates above.
//! - [`scene`], [`render`], [`selftest`], [`cli`]: the command line front end.

pub mod ball_model;
pub mod charge;
pub mod cli;
pub mod constructions;
mod error;
pub mod hypercone;
pub mod minkowski;
mod numeric;
pub mod render;
pub mod sampling;
pub mod scene;
pub mod selftest;
mod support;
mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;

pub use ball_model::{BallPoint, Cap, Hyperboloid, SphereDirection};
pub use hypercone::{BallCone, Hyperball, Hypercone};
pub use minkowski::{FourVector, LorentzTransform, PoincareElement};
