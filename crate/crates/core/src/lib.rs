//! Quantum information toolkit.
//!
//! Dense, desk-scale numerics for quantum information: operator algebra and
//! decompositions ([`linalg`]), pure/mixed states ([`states`]), a gate catalog
//! with synthesis pipelines ([`gates`]), circuit simulation and measurement
//! ([`circuits`]), canonical algorithms ([`algorithms`]), Kraus channels
//! ([`channels`]), distance and entropy measures ([`infotheory`]),
//! entanglement monotones ([`entanglement`]) and CHSH machinery ([`bell`]).
//!
//! Everything is `f64`/`Complex64` and dense; the intended regime is up to
//! roughly 12 qubits for state vectors and 6 qubits for density matrices.

// Index loops over matrix entries stay explicit, and `!(x < tol)` is the
// NaN-rejecting form of the tolerance checks.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod bell;
pub mod channels;
pub mod circuits;
pub mod entanglement;
pub mod error;
pub mod gates;
pub mod infotheory;
pub mod linalg;
pub mod states;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Default absolute tolerance for predicates and invariant checks.
///
/// Double-precision decompositions on the dimensions this crate targets stay
/// comfortably below this; callers can pass their own tolerance everywhere one
/// is accepted. Overridable at the CLI via `QITK_TOL`.
pub const DEFAULT_TOL: f64 = 1e-9;
