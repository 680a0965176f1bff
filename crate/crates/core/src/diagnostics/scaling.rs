//! Parabolic rescaling `rho(lx, l^2 t)`, `l u(lx, l^2 t)`, `l H(lx, l^2 t)`,
//! `l^2 p(lx, l^2 t)`.
//!
//! The rescaled state lives on the box of side `L / l` with the same sample
//! count, so grid point `j` of the new box sees exactly sample `j` of the
//! old one and the map involves no interpolation. In `d` dimensions
//! kinetic and magnetic energies pick up `l^(2-d)`, gradient energies
//! `l^(4-d)`, so the critical quantity is invariant in 3D.

use crate::field::{ScalarField, VectorField};
use crate::solver::State;

use super::DiagnosticsError;

fn relabel(f: &ScalarField, grid: &std::sync::Arc<crate::field::Grid>, factor: f64) -> ScalarField {
    ScalarField::from_real(grid, f.values().iter().map(|v| factor * v).collect())
}

pub fn scaling_transform(state: &State, scale: f64) -> Result<State, DiagnosticsError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(DiagnosticsError::InvalidInput(format!("scale must be positive, got {scale}")));
    }
    if scale == 1.0 {
        return Ok(state.clone());
    }
    let grid = state.grid().with_box_length(state.grid().box_length() / scale)?;
    let vector = |v: &VectorField| {
        VectorField::new(v.components().iter().map(|c| relabel(c, &grid, scale)).collect())
    };
    Ok(State {
        t: state.t / (scale * scale),
        rho: relabel(&state.rho, &grid, 1.0),
        u: vector(&state.u)?,
        h: vector(&state.h)?,
        p: relabel(&state.p, &grid, scale * scale),
    })
}

/// Exponent `k` with `F(scaled) = l^k F` for the energy-type norms:
/// `(kinetic/magnetic, gradient, critical)`.
pub fn scaling_exponents(dim: usize) -> (i32, i32, i32) {
    let d = dim as i32;
    (2 - d, 4 - d, 6 - 2 * d)
}
