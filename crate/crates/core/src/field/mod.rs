//! Periodic-box fields and spectral calculus.

pub mod calculus;
mod grid;
pub mod norms;
mod scalar;
pub mod snapshot;
mod vector;

pub use calculus::{
    advective_derivative, curl, dealiased_product, divergence, gradient, laplacian, leray_project,
    partial, truncate, Curl,
};
pub use grid::Grid;
pub use norms::{
    inner_product, l2_norm, lp_norm, l6_norm_second_derivatives, sobolev_h1_seminorm,
    sobolev_h2_norm,
};
pub use scalar::ScalarField;
pub use vector::VectorField;

#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("expected {expected} components, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
