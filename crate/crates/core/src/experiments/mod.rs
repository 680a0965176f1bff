//! Initial data, exact-solution checks and amplitude sweeps.

use thiserror::Error;

use crate::diagnostics::DiagnosticsError;
use crate::field::FieldError;
use crate::solver::SolverError;

mod initial;
mod run;
mod sweep;
mod verification;

pub use initial::{generate_initial, random_solenoidal, DensityProfile, Family, GridSpec, InitialData};
pub use run::{continue_trajectory, next_dt, run_trajectory, RunOptions, RunOutcome};
pub use sweep::{
    classify_trajectory, run_row, run_sweep, threshold_band, Classification, SweepConfig, SweepResult, SweepRow,
    Thresholds,
};
pub use verification::{
    check_cross_term, check_density_translation, check_energy_identity, check_heat_decay, check_scaling,
    check_taylor_green, energy_refinement, run_verification_suite, CheckResult, CheckStatus, VerificationConfig,
    VerificationReport, CHECK_NAMES, MIN_RESOLVED_N,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid input: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
