//! Kustaanheimo-Stiefel regularization of the Kepler problem.
//!
//! The crate follows the regularization pipeline end to end:
//!
//! - [`invariants`]: the `pi` invariants and the `(K, L, H2, Xi; U, V)`
//!   generators of the `Xi` circle action on `T R^4`,
//! - [`quadratic_poisson`]: an exact-rational bracket engine for quadratic
//!   forms, used as the oracle for every bracket relation,
//! - [`orbit_space`]: defining relations of the orbit spaces, the reduced
//!   momentum map and fiber reconstructions,
//! - [`ks_map`]: the ks / KS maps and their pullback identities,
//! - [`kepler_dynamics`]: Kepler-side Hamiltonians, vector fields and the
//!   radial collision time,
//! - [`flows`]: exact torus flows, collision-set detection and the
//!   flow-relatedness harness,
//! - [`cli`]: the batch drivers behind the `ksreg` binary.

pub mod cli;
pub mod error;
pub mod flows;
pub mod integrate;
pub mod invariants;
pub mod kepler_dynamics;
pub mod ks_map;
pub mod orbit_space;
pub mod quadratic_poisson;
pub mod sampling;
pub mod scalar;
pub mod trajectory;

pub use error::{Error, Result};
pub use invariants::{GeneratorVector, PhasePoint8, PiVector, ReducedPoint};
pub use ks_map::PhasePoint6;

pub use scalar::{Rational, Scalar, SmallRational};
