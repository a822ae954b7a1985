//! Invariant Ricci-flat Kähler metrics on tangent bundles of rank-one
//! Riemannian symmetric spaces of compact type.
//!
//! The crate builds the complete radial families of such metrics and
//! verifies every defining condition numerically:
//!
//! * [`registry`] holds the rank-one spaces and their root multiplicities.
//! * [`algebra`] realizes `so(n+1)`, `su(n+1)` and `sp(n+1)` as matrix
//!   algebras graded by `ad_X²`, with the operators `T`, `R_x`, `S_x`, `J`.
//! * [`profiles`] evaluates the radial functions `f'`, `f''` and the
//!   vector-function `a(x)`.
//! * [`verifier`] assembles the Hermitian matrices `w_H`, `w_*` in closed
//!   form and from Lie brackets, and runs the Kähler / Ricci-flat /
//!   extension / ℤ₂ checks.
//! * [`completeness`] handles the unit radial geodesic field, the level-set
//!   distance and the Bernoulli reduction.
//! * [`report`] drives a full verification run and serializes the results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod completeness;
pub mod error;
pub mod numerics;
pub mod profiles;
pub mod registry;
pub mod report;
pub mod verifier;

pub use error::{Error, Result};
pub use registry::{lookup_space, validate_params, Family, RadialParams, SpaceDescriptor};

/// Library version recorded in verification reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default seed for every randomized sample ("RF4K" in ASCII).
pub const DEFAULT_SEED: u64 = 0x5246_344B;
