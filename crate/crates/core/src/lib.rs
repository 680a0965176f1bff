//! Pseudo-spectral simulator for density-dependent incompressible MHD on a
//! periodic box, with diagnostics for the energy functionals, blow-up
//! integrals and the scale-invariant smallness quantity
//! `(||sqrt(rho) u||^2 + ||H||^2)(||grad u||^2 + ||grad H||^2)`.
//!
//! Modules, bottom-up:
//! * [`field`]: grids, scalar/vector fields, spectral calculus, norms, snapshots;
//! * [`solver`]: density transport, momentum and induction steps, pressure projection;
//! * [`diagnostics`]: per-state functionals and trajectory ledgers;
//! * [`experiments`]: initial data, verification oracles, amplitude sweeps;
//! * [`cli`]: config files, checkpoints and the `mhdcrit` subcommands.

pub mod diagnostics;
pub mod experiments;
pub mod field;
pub mod solver;

#[cfg(feature = "cli")]
pub mod cli;

pub use field::{FieldError, Grid, ScalarField, VectorField};
