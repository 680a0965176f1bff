//! Variable-coefficient pressure projection.
//!
//! Solves `div((1/rho~) grad p) = div(u*) / dt` with `rho~ = max(rho, floor)`
//! by conjugate gradients on the negated (positive semi-definite) operator,
//! preconditioned with the constant-coefficient spectral inverse Laplacian.
//! The floor is applied only here; the transported density is untouched.

use rustfft::num_complex::Complex64;

use crate::field::{divergence, gradient, ScalarField, VectorField};

use super::krylov::pcg;
use super::{PhysicalParams, SolverError};

#[derive(Clone, Debug)]
pub struct PressureSolution {
    /// Zero-mean pressure (increment) field.
    pub p: ScalarField,
    pub iterations: usize,
    pub residual: f64,
}

/// Pointwise inverse floored density.
pub fn inverse_density(rho: &ScalarField, floor: f64) -> Vec<f64> {
    rho.values().iter().map(|&r| 1.0 / r.max(floor)).collect()
}

fn apply_operator(grid: &std::sync::Arc<crate::field::Grid>, coeff: &[f64], x: &[f64]) -> Vec<f64> {
    let f = ScalarField::from_real(grid, x.to_vec());
    let g = gradient(&f);
    let flux = VectorField::from_components_unchecked(
        g.components()
            .iter()
            .map(|c| {
                ScalarField::from_real(grid, c.values().iter().zip(coeff).map(|(a, m)| a * m).collect())
            })
            .collect(),
    );
    divergence(&flux).values().iter().map(|v| -v).collect()
}

fn inverse_laplacian(grid: &std::sync::Arc<crate::field::Grid>, scale: f64, r: &[f64]) -> Vec<f64> {
    let kd2 = grid.kd_squared();
    let f = ScalarField::from_real(grid, r.to_vec());
    f.map_spectral(|i, c| if kd2[i] > 0.0 { c / (scale * kd2[i]) } else { Complex64::new(0.0, 0.0) })
        .values()
        .to_vec()
}

pub fn pressure_solve(
    rho: &ScalarField,
    u_star: &VectorField,
    dt: f64,
    params: &PhysicalParams,
    tol: f64,
    max_iters: usize,
) -> Result<PressureSolution, SolverError> {
    let grid = rho.grid();
    let rhs = divergence(u_star);
    let b: Vec<f64> = rhs.values().iter().map(|v| -v / dt).collect();
    let coeff = inverse_density(rho, params.floor());
    let mean_coeff = coeff.iter().sum::<f64>() / coeff.len() as f64;
    let out = pcg(
        &b,
        |x| apply_operator(grid, &coeff, x),
        |r| inverse_laplacian(grid, mean_coeff, r),
        tol,
        max_iters,
    );
    if !out.converged {
        return Err(SolverError::PressureNotConverged { iterations: out.iterations, residual: out.residual });
    }
    Ok(PressureSolution {
        p: ScalarField::from_real(grid, out.solution),
        iterations: out.iterations,
        residual: out.residual,
    })
}

/// `u* - dt (1/rho~) grad p`.
pub fn apply_correction(u_star: &VectorField, p: &ScalarField, rho: &ScalarField, dt: f64, floor: f64) -> VectorField {
    let coeff = inverse_density(rho, floor);
    let g = gradient(p);
    let grid = u_star.grid();
    VectorField::from_components_unchecked(
        u_star
            .components()
            .iter()
            .zip(g.components())
            .map(|(us, gp)| {
                let v = us
                    .values()
                    .iter()
                    .zip(gp.values())
                    .zip(&coeff)
                    .map(|((a, b), m)| a - dt * m * b)
                    .collect();
                ScalarField::from_real(grid, v)
            })
            .collect(),
    )
}
