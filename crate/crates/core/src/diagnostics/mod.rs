//! Energy functionals, identities and blow-up quantities of states and
//! trajectories.

use thiserror::Error;

use crate::field::FieldError;

pub mod export;
mod functionals;
mod ledger;
mod scaling;

pub use functionals::{
    blowup_functional, critical_quantity, cross_term_check, cross_term_scale, energy_balance, gradient_energy,
    kinetic_energy, lemma22_holder_bound, lemma22_terms, magnetic_energy, total_energy, BlowupFunctional,
};
pub use ledger::{
    blowup_criterion, blowup_criterion_with, lemma23_functionals, recompute_integrals, DiagnosticsRecord,
    LedgerAccumulator, Lemma23, TrajectoryLedger,
};
pub use scaling::{scaling_exponents, scaling_transform};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("ledger has no samples")]
    EmptyLedger,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
