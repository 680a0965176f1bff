//! Explicit nonlinear terms and the implicit viscous solve.

use crate::field::calculus::{advective_derivative, product};
use crate::field::{ScalarField, VectorField};

use super::krylov::pcg;
use super::{PhysicalParams, SolverError, State};

/// `-rho (u.grad)u + (H.grad)H`, every product dealiased.
pub fn momentum_explicit(rho: &ScalarField, u: &VectorField, h: &VectorField) -> VectorField {
    let adv = advective_derivative(u, u);
    let lorentz = advective_derivative(h, h);
    VectorField::from_components_unchecked(
        adv.components()
            .iter()
            .zip(lorentz.components())
            .map(|(a, l)| l.sub(&product(rho, a)))
            .collect(),
    )
}

/// Explicit part of the momentum balance for `state`; pressure and viscous
/// terms are handled by the projection and the implicit solve.
pub fn momentum_rhs(state: &State, _params: &PhysicalParams) -> VectorField {
    momentum_explicit(&state.rho, &state.u, &state.h)
}

/// `(H.grad)u - (u.grad)H`.
pub fn induction_explicit(u: &VectorField, h: &VectorField) -> VectorField {
    advective_derivative(h, u).sub(&advective_derivative(u, h))
}

/// Solve `rho x / dt - c Lap x = rhs` componentwise, `c = weight * mu`.
///
/// The operator is symmetric positive definite whenever `rho >= 0` has a
/// positive mean, vacuum included. Preconditioned with the spectral inverse
/// of the same operator at the mean density, which is exact for uniform
/// density.
pub fn viscous_solve(
    rho: &ScalarField,
    rhs: &VectorField,
    dt: f64,
    diffusion: f64,
    tol: f64,
    max_iters: usize,
) -> Result<(VectorField, usize), SolverError> {
    let grid = rho.grid();
    let rho_v = rho.values();
    let rho_mean = rho.mean();
    if rho_mean <= 0.0 {
        return Err(SolverError::InvalidState("density vanishes identically".into()));
    }
    let k2 = grid.k_squared();
    let uniform = rho.min() == rho.max();
    let precond = |r: &[f64]| -> Vec<f64> {
        let f = ScalarField::from_real(grid, r.to_vec());
        f.map_spectral(|i, c| c / (rho_mean / dt + diffusion * k2[i])).values().to_vec()
    };
    let apply = |x: &[f64]| -> Vec<f64> {
        let f = ScalarField::from_real(grid, x.to_vec());
        let lap = f.map_spectral(|i, c| c * (diffusion * k2[i]));
        x.iter().zip(rho_v).zip(lap.values()).map(|((xi, r), l)| r * xi / dt + l).collect()
    };
    let mut iters = 0;
    let mut comps = Vec::with_capacity(rhs.dim());
    for c in rhs.components() {
        if uniform {
            let out = c.map_spectral(|i, z| z / (rho_mean / dt + diffusion * k2[i]));
            comps.push(out);
            continue;
        }
        let out = pcg(c.values(), apply, precond, tol, max_iters);
        if !out.converged {
            return Err(SolverError::ViscousNotConverged { iterations: out.iterations, residual: out.residual });
        }
        iters += out.iterations;
        comps.push(ScalarField::from_real(grid, out.solution));
    }
    Ok((VectorField::from_components_unchecked(comps), iters))
}

/// `exp(tau * lambda * Lap)` applied mode by mode.
pub fn heat_factor(v: &VectorField, lambda: f64, tau: f64) -> VectorField {
    let k2 = v.grid().k_squared();
    v.map(|c| c.map_spectral(|i, z| z * (-lambda * k2[i] * tau).exp()))
}
