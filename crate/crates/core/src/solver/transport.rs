//! Semi-Lagrangian density transport.
//!
//! Characteristics are traced backwards with the explicit midpoint rule in
//! a frozen velocity field, and the density is sampled at the foot point
//! with a tensor-product cubic. The result is clamped to fixed bounds
//! (`[0, rho_bar]` inside the solver), so transport can never leave the
//! admissible range and vacuum (`rho = 0`) stays exactly at zero. Clipping
//! to the current sample range, or to the enclosing cell, instead erodes
//! every peak that falls between nodes.

use crate::field::{ScalarField, VectorField};

use super::SolverError;

struct Stencil {
    idx: [usize; 4],
    w: [f64; 4],
}

fn stencil(pos: f64, n: usize) -> Stencil {
    let base = pos.floor();
    let t = pos - base;
    let i = base as i64;
    let n_i = n as i64;
    let wrap = |k: i64| k.rem_euclid(n_i) as usize;
    Stencil {
        idx: [wrap(i - 1), wrap(i), wrap(i + 1), wrap(i + 2)],
        w: [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ],
    }
}

/// Cubic sample of `data` at fractional grid position `pos` (grid units).
fn sample(data: &[f64], n: usize, dim: usize, pos: [f64; 3]) -> f64 {
    let s: Vec<Stencil> = (0..dim).map(|a| stencil(pos[a], n)).collect();
    let mut value = 0.0;
    if dim == 2 {
        for a in 0..4 {
            let row = s[0].idx[a] * n;
            let mut acc = 0.0;
            for b in 0..4 {
                acc += s[1].w[b] * data[row + s[1].idx[b]];
            }
            value += s[0].w[a] * acc;
        }
    } else {
        for a in 0..4 {
            let plane = s[0].idx[a] * n;
            let mut acc_a = 0.0;
            for b in 0..4 {
                let row = (plane + s[1].idx[b]) * n;
                let mut acc_b = 0.0;
                for c in 0..4 {
                    acc_b += s[2].w[c] * data[row + s[2].idx[c]];
                }
                acc_a += s[1].w[b] * acc_b;
            }
            value += s[0].w[a] * acc_a;
        }
    }
    value
}

/// Advective CFL number `max|u| dt / h`.
pub fn advective_cfl(u: &VectorField, dt: f64) -> f64 {
    u.max_magnitude() * dt / u.grid().spacing()
}

/// Transport `rho` for time `dt` along the frozen, divergence-free `u`,
/// clamping the result to `bounds = (lo, hi)`.
pub fn advect_density(
    rho: &ScalarField,
    u: &VectorField,
    dt: f64,
    cfl_cap: f64,
    bounds: (f64, f64),
) -> Result<ScalarField, SolverError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SolverError::InvalidParams(format!("transport step needs dt > 0, got {dt}")));
    }
    let cfl = advective_cfl(u, dt);
    if cfl > cfl_cap {
        return Err(SolverError::Cfl { cfl, cap: cfl_cap });
    }
    // a uniform density is transported exactly
    if cfl == 0.0 || rho.min() == rho.max() {
        return Ok(rho.clone());
    }
    let grid = rho.grid();
    let n = grid.n();
    let dim = grid.dim();
    let scale = dt / grid.spacing();
    let vel: Vec<&[f64]> = u.components().iter().map(|c| c.values()).collect();
    let data = rho.values();
    let (lo, hi) = bounds;

    let mut out = vec![0.0; grid.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let mut p = [0.0; 3];
        let mut rem = idx;
        for axis in (0..dim).rev() {
            p[axis] = (rem % n) as f64;
            rem /= n;
        }
        let mut mid = p;
        for a in 0..dim {
            mid[a] -= 0.5 * scale * vel[a][idx];
        }
        let mut foot = p;
        for a in 0..dim {
            foot[a] -= scale * sample(vel[a], n, dim, mid);
        }
        *o = sample(data, n, dim, foot).clamp(lo, hi);
    }
    Ok(ScalarField::from_real(grid, out))
}
