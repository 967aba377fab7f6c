//! Compatibility and comeasurability analysis for quantum logics with unique
//! conditional probabilities.
//!
//! Two backends realize the same conditioning interface: finite-dimensional
//! Hilbert models (projections, density matrices, Lüders conditioning) and
//! finite abstract orthologics (explicit orthogonality relation and partial
//! sum table, states as a convex polytope). On top of them the crate
//! classifies event pairs into a five-level hierarchy (one-sided influence
//! freeness, compatibility, weak and strong comeasurability, membership in
//! a common Boolean subalgebra) and verifies the structural results
//! connecting the levels.

pub mod matrix;

pub mod catalog;
pub mod cli;
pub mod exact;
pub mod hierarchy;
pub mod hilbert;
pub mod logic;
pub mod pprojection;
pub mod report;
pub mod scenario;
pub mod states;

pub use hilbert::{DensityState, HilbertScenario, Projection};
pub use logic::{Elem, OrthoLogic};
pub use states::{AbstractState, StatePolytope};
