//! Functionals of single states and of consecutive state pairs.

use crate::field::calculus::{advective_derivative, product};
use crate::field::norms::{
    gradient_magnitude_sq, h1_seminorm_sq, integrate_samples, lp_norm, scalar_h1_seminorm, sobolev_h2_norm,
    vector_inner_product, vector_l2_norm, vector_l2_norm_sq, vector_lp_norm, w26_norm,
};
use crate::field::{curl, gradient, ScalarField, VectorField};
use crate::solver::{PhysicalParams, State};

use super::DiagnosticsError;

/// `int rho |u|^2 dx`.
pub fn kinetic_energy(state: &State) -> f64 {
    let rho = state.rho.values();
    let mut w = vec![0.0; rho.len()];
    for c in state.u.components() {
        for ((o, v), r) in w.iter_mut().zip(c.values()).zip(rho) {
            *o += r * v * v;
        }
    }
    integrate_samples(state.grid(), &w)
}

/// `||H||_2^2`.
pub fn magnetic_energy(state: &State) -> f64 {
    vector_l2_norm_sq(&state.h)
}

/// `E_tot = (||sqrt(rho) u||^2 + ||H||^2) / 2`.
pub fn total_energy(state: &State) -> f64 {
    0.5 * (kinetic_energy(state) + magnetic_energy(state))
}

/// `||grad u||^2 + ||grad H||^2`.
pub fn gradient_energy(state: &State) -> f64 {
    h1_seminorm_sq(&state.u) + h1_seminorm_sq(&state.h)
}

/// Energy-identity residual of one step,
/// `E_tot(next) - E_tot(prev) + dt (mu ||grad u||^2 + lambda ||curl H||^2)`
/// with the gradients taken of the midpoint averages.
pub fn energy_balance(prev: &State, next: &State, dt: f64, params: &PhysicalParams) -> f64 {
    let u_mid = prev.u.lincomb(0.5, &next.u, 0.5);
    let h_mid = prev.h.lincomb(0.5, &next.h, 0.5);
    let dissipation = params.mu * h1_seminorm_sq(&u_mid) + params.lambda * curl(&h_mid).norm_sq();
    total_energy(next) - total_energy(prev) + dt * dissipation
}

/// `int (H.grad)H . u + int (H.grad)u . H`, zero in the continuum for
/// divergence-free `H`.
pub fn cross_term_check(state: &State) -> f64 {
    let (u, h) = (&state.u, &state.h);
    vector_inner_product(&advective_derivative(h, h), u) + vector_inner_product(&advective_derivative(h, u), h)
}

/// Natural size of the cross terms, `||H||_2 ||H||_inf ||grad u||_2`.
pub fn cross_term_scale(state: &State) -> f64 {
    vector_l2_norm(&state.h) * state.h.max_magnitude() * h1_seminorm_sq(&state.u).sqrt()
}

/// `(||sqrt(rho) u||^2 + ||H||^2)(||grad u||^2 + ||grad H||^2)`.
pub fn critical_quantity(state: &State) -> f64 {
    (kinetic_energy(state) + magnetic_energy(state)) * gradient_energy(state)
}

fn magnitude_sq(v: &VectorField) -> Vec<f64> {
    let mut out = vec![0.0; v.grid().len()];
    for c in v.components() {
        for (o, x) in out.iter_mut().zip(c.values()) {
            *o += x * x;
        }
    }
    out
}

/// The four integrals
/// `int |H|^2 (|grad u|^2 + |grad H|^2)`, `int |u|^2 |grad H|^2`,
/// `int rho |u|^2 |grad u|^2`, `int |H|^2 |grad u|`.
pub fn lemma22_terms(state: &State) -> [f64; 4] {
    let grid = state.grid();
    let h2 = magnitude_sq(&state.h);
    let u2 = magnitude_sq(&state.u);
    let gu = gradient_magnitude_sq(&state.u);
    let gh = gradient_magnitude_sq(&state.h);
    let rho = state.rho.values();
    let len = grid.len();
    let (mut a, mut b, mut c, mut d) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    for i in 0..len {
        a[i] = h2[i] * (gu[i] + gh[i]);
        b[i] = u2[i] * gh[i];
        c[i] = rho[i] * u2[i] * gu[i];
        d[i] = h2[i] * gu[i].sqrt();
    }
    [
        integrate_samples(grid, &a),
        integrate_samples(grid, &b),
        integrate_samples(grid, &c),
        integrate_samples(grid, &d),
    ]
}

/// `||H||_4^2 ||grad u||_2`, the Hoelder bound of the last lemma-2.2 term.
pub fn lemma22_holder_bound(state: &State) -> f64 {
    vector_lp_norm(&state.h, 4.0).powi(2) * h1_seminorm_sq(&state.u).sqrt()
}

/// Instantaneous blow-up functional split into its supremum part
/// `||(grad rho, rho_t)|| + ||(u,H)||_{H^2} + ||H_t|| + ||sqrt(rho) u_t||`
/// and its integrand `||(u,H)||_{W^{2,6}}^2 + ||(u_t,H_t)||_{H^1}^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowupFunctional {
    pub sup_part: f64,
    pub integrand: f64,
}

impl BlowupFunctional {
    pub fn total(&self) -> f64 {
        self.sup_part + self.integrand
    }
}

/// Evaluated at `next`, time derivatives by backward differences and
/// `rho_t = -u.grad rho` from the transport equation.
pub fn blowup_functional(prev: &State, next: &State, dt: f64) -> Result<BlowupFunctional, DiagnosticsError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DiagnosticsError::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    if !prev.grid().same_as(next.grid()) {
        return Err(DiagnosticsError::InvalidInput("states live on different grids".into()));
    }
    let grad_rho = gradient(&next.rho);
    let mut rho_t = ScalarField::zeros(next.grid());
    for (u, g) in next.u.components().iter().zip(grad_rho.components()) {
        rho_t = rho_t.sub(&product(u, g));
    }
    let u_t = next.u.lincomb(1.0 / dt, &prev.u, -1.0 / dt);
    let h_t = next.h.lincomb(1.0 / dt, &prev.h, -1.0 / dt);
    let weighted_ut = {
        let rho = next.rho.values();
        let mut w = vec![0.0; rho.len()];
        for c in u_t.components() {
            for ((o, v), r) in w.iter_mut().zip(c.values()).zip(rho) {
                *o += r * v * v;
            }
        }
        integrate_samples(next.grid(), &w).sqrt()
    };
    let rho_part = (scalar_h1_seminorm(&next.rho).powi(2) + lp_norm(&rho_t, 2.0).powi(2)).sqrt();
    let h2_part = (sobolev_h2_norm(&next.u).powi(2) + sobolev_h2_norm(&next.h).powi(2)).sqrt();
    let sup_part = rho_part + h2_part + vector_l2_norm(&h_t) + weighted_ut;
    let h1_full = |v: &VectorField| vector_l2_norm_sq(v) + h1_seminorm_sq(v);
    let integrand = w26_norm(&next.u).powi(2) + w26_norm(&next.h).powi(2) + h1_full(&u_t) + h1_full(&h_t);
    Ok(BlowupFunctional { sup_part, integrand })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use std::f64::consts::PI;

    fn tg_state(a: f64) -> State {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let u = VectorField::from_fn(&g, |x| [a * x[0].sin() * x[1].cos(), -a * x[0].cos() * x[1].sin(), 0.0]);
        State::new(0.0, ScalarField::constant(&g, 1.0), u, VectorField::zeros(&g))
    }

    #[test]
    fn taylor_green_critical_quantity() {
        let a = 0.3;
        let q = critical_quantity(&tg_state(a));
        let exact = 8.0 * PI.powi(4) * a.powi(4);
        assert!((q - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn rest_state_vanishes() {
        let s = tg_state(0.0);
        assert_eq!(critical_quantity(&s), 0.0);
        assert_eq!(lemma22_terms(&s), [0.0; 4]);
        assert_eq!(cross_term_check(&s), 0.0);
        let params = PhysicalParams::new(0.1, 0.1, 1.0);
        assert_eq!(energy_balance(&s, &s, 0.1, &params), 0.0);
    }

    #[test]
    fn lemma22_single_mode() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let a: f64 = 1.5;
        let h = VectorField::from_fn(&g, |x| [a * x[1].sin(), 0.0, 0.0]);
        let s = State::new(0.0, ScalarField::constant(&g, 1.0), VectorField::zeros(&g), h);
        let t = lemma22_terms(&s);
        // int sin^2 y cos^2 y over [0, 2pi]^2 = pi^2 / 2
        let exact = a.powi(4) * PI * PI / 2.0;
        assert!((t[0] - exact).abs() < 1e-12 * exact);
        assert_eq!(&t[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn blowup_functional_at_rest_is_density_gradient() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let rho = ScalarField::from_fn(&g, |x| 0.5 + 0.25 * x[0].sin());
        let s = State::new(0.0, rho.clone(), VectorField::zeros(&g), VectorField::zeros(&g));
        let b = blowup_functional(&s, &s, 0.1).unwrap();
        assert!((b.sup_part - scalar_h1_seminorm(&rho)).abs() < 1e-14);
        assert_eq!(b.integrand, 0.0);
        assert!(blowup_functional(&s, &s, 0.0).is_err());
    }
}
