//! Time integration of the inhomogeneous incompressible MHD system
//!
//! ```text
//! rho_t + u.grad rho = 0
//! rho (u_t + (u.grad)u) - mu Lap u + grad p = (H.grad)H
//! H_t + (u.grad)H - lambda Lap H = (H.grad)u
//! div u = div H = 0
//! ```
//!
//! on a periodic box, allowing vacuum (`rho = 0`) on sets of positive measure.

use thiserror::Error;

use crate::field::FieldError;

pub mod krylov;
pub mod momentum;
mod params;
pub mod pressure;
mod state;
mod step;
pub mod transport;

pub use momentum::momentum_rhs;
pub use params::{DtPolicy, PhysicalParams, SolverSettings};
pub use pressure::{pressure_solve, PressureSolution};
pub use state::State;
#[allow(unused_imports)]
pub(crate) use state::relative_divergence;
pub use step::{choose_dt, cfl_dt, step, step_dt, step_induction, step_momentum, step_with, StepReport};
pub use transport::advect_density;

/// Version tag written into checkpoints; bump when the scheme changes.
pub const SCHEME_VERSION: &str = "ars222-strang-sl3-v1";

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("CFL number {cfl:.3} exceeds cap {cap}")]
    Cfl { cfl: f64, cap: f64 },
    #[error("pressure solve did not converge: {iterations} iterations, residual {residual:e}")]
    PressureNotConverged { iterations: usize, residual: f64 },
    #[error("viscous solve did not converge: {iterations} iterations, residual {residual:e}")]
    ViscousNotConverged { iterations: usize, residual: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}
