//! Minimum-fuel low-thrust transfer planning between circular orbits.
//!
//! The crate models a spacecraft with a small continuous thrust acceleration
//! moving between circular orbits whose ascending nodes drift under Earth
//! oblateness. On top of the averaged dynamics it provides:
//!
//! - closed-form single-burn transfers ([`edelbaum`]),
//! - a trajectory propagator for burn/coast schedules driven by adjoint
//!   variables ([`propagator`]),
//! - a burn-coast-burn heuristic that picks a drift orbit so the node
//!   precesses onto the target plane ([`ses`]),
//! - finite-difference sensitivities of the optimal cost, used to seed the
//!   adjoints ([`sensitivity`]),
//! - a shooting solver for the full optimality system ([`shooting`]),
//! - analysis of singular (intermediate-thrust) arcs ([`singular`]).
//!
//! All internal quantities are SI; conversion helpers live in [`units`].

pub mod edelbaum;
pub mod error;
pub mod model;
pub mod propagator;
pub mod sensitivity;
pub mod ses;
pub mod shooting;
pub mod singular;
pub mod units;

pub(crate) mod solvers;

pub use error::{Error, Result};
pub use model::{GravityModel, OrbitState, PropellantBudget, SequenceRow, TransferProblem};
