//! One time step of the coupled system.
//!
//! Density is advanced by two half steps of semi-Lagrangian transport
//! around the flow update, which sees the mid-step density as a frozen
//! coefficient. The flow update is the two-stage IMEX ARS(2,2,2) scheme:
//! viscosity implicit with the density as mass, advection, Lorentz force
//! and stretching explicit, each stage followed by a variable-density
//! projection. The magnetic field follows the same explicit tableau with
//! the heat semigroup applied exactly in spectral space.

use crate::field::calculus::vector_laplacian;
use crate::field::{gradient, leray_project, ScalarField, VectorField};

use super::momentum::{heat_factor, induction_explicit, momentum_explicit, viscous_solve};
use super::pressure::{apply_correction, pressure_solve};
use super::transport::{advect_density, advective_cfl};
use super::{DtPolicy, PhysicalParams, SolverError, SolverSettings, State};

/// Implicit weight, `1 - 1/sqrt(2)`.
pub const GAMMA: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
/// Explicit weight of the first stage in the second.
pub const DELTA: f64 = 1.0 - 1.0 / (2.0 * GAMMA);

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepReport {
    pub dt_used: f64,
    /// Total preconditioned CG iterations over both projections.
    pub pressure_iters: usize,
    /// Largest final relative residual of the projections.
    pub pressure_residual: f64,
    pub cfl: f64,
    pub viscous_iters: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Coupled,
    MomentumOnly,
    InductionOnly,
}

struct Flow {
    u: VectorField,
    h: VectorField,
    p: ScalarField,
}

fn grad_times(p: &ScalarField, a: f64) -> VectorField {
    gradient(p).scale(a)
}

fn mass(rho: &ScalarField, u: &VectorField, inv_dt: f64) -> VectorField {
    u.map(|c| rho.mul_pointwise(c).scale(inv_dt))
}

#[allow(clippy::too_many_arguments)]
fn project(
    rho: &ScalarField,
    u_star: &VectorField,
    dt: f64,
    params: &PhysicalParams,
    settings: &SolverSettings,
    report: &mut StepReport,
) -> Result<(VectorField, ScalarField), SolverError> {
    let sol = pressure_solve(rho, u_star, dt, params, settings.pressure_tol, settings.pressure_max_iters)?;
    report.pressure_iters += sol.iterations;
    report.pressure_residual = report.pressure_residual.max(sol.residual);
    let u = apply_correction(u_star, &sol.p, rho, dt, params.floor());
    Ok((u, sol.p))
}

#[allow(clippy::too_many_arguments)]
fn advance_flow(
    rho: &ScalarField,
    u0: &VectorField,
    h0: &VectorField,
    p0: &ScalarField,
    dt: f64,
    params: &PhysicalParams,
    settings: &SolverSettings,
    mode: Mode,
    report: &mut StepReport,
) -> Result<Flow, SolverError> {
    let (mu, lam) = (params.mu, params.lambda);
    let evolve_u = mode != Mode::InductionOnly;
    let evolve_h = mode != Mode::MomentumOnly;

    // stage 2
    let n1 = evolve_u.then(|| momentum_explicit(rho, u0, h0));
    let g1 = evolve_h.then(|| induction_explicit(u0, h0));
    let base = evolve_u.then(|| mass(rho, u0, 1.0 / dt));

    let (u2, p2) = match (&n1, &base) {
        (Some(n1), Some(base)) => {
            let rhs = base.add(&n1.scale(GAMMA)).sub(&grad_times(p0, GAMMA));
            let (u_star, it) =
                viscous_solve(rho, &rhs, dt, GAMMA * mu, settings.viscous_tol, settings.viscous_max_iters)?;
            report.viscous_iters += it;
            let (u2, phi) = project(rho, &u_star, dt, params, settings, report)?;
            (u2, p0.add(&phi.scale(1.0 / GAMMA)))
        }
        _ => (u0.clone(), p0.clone()),
    };
    let h2 = match &g1 {
        Some(g1) => heat_factor(&h0.add(&g1.scale(GAMMA * dt)), lam, GAMMA * dt),
        None => h0.clone(),
    };

    // stage 3
    let (u3, p3) = match (&n1, &base) {
        (Some(n1), Some(base)) => {
            let n2 = momentum_explicit(rho, &u2, &h2);
            let rhs = base
                .add(&vector_laplacian(&u2).scale((1.0 - GAMMA) * mu))
                .add(&n1.scale(DELTA))
                .add(&n2.scale(1.0 - DELTA))
                .sub(&gradient(&p2));
            let (u_star, it) =
                viscous_solve(rho, &rhs, dt, GAMMA * mu, settings.viscous_tol, settings.viscous_max_iters)?;
            report.viscous_iters += it;
            let (u3, phi) = project(rho, &u_star, dt, params, settings, report)?;
            (leray_project(&u3), p2.add(&phi))
        }
        _ => (u0.clone(), p0.clone()),
    };
    let h3 = match &g1 {
        Some(g1) => {
            let g2 = induction_explicit(&u2, &h2);
            let direct = heat_factor(&h0.add(&g1.scale(DELTA * dt)), lam, dt);
            let late = heat_factor(&g2.scale((1.0 - DELTA) * dt), lam, (1.0 - GAMMA) * dt);
            leray_project(&direct.add(&late))
        }
        None => h0.clone(),
    };
    Ok(Flow { u: u3, h: h3, p: p3 })
}

fn check_finite(state: &State) -> Result<(), SolverError> {
    let finite = |f: &ScalarField| f.values().iter().all(|v| v.is_finite());
    let ok = finite(&state.rho)
        && state.u.components().iter().all(finite)
        && state.h.components().iter().all(finite)
        && finite(&state.p);
    if ok {
        Ok(())
    } else {
        Err(SolverError::InvalidState("non-finite values produced".into()))
    }
}

fn validate_inputs(state: &State, params: &PhysicalParams, dt: f64) -> Result<(), SolverError> {
    params.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SolverError::InvalidParams(format!("dt must be positive, got {dt}")));
    }
    if state.u.dim() != state.grid().dim() || state.h.dim() != state.grid().dim() {
        return Err(SolverError::InvalidState("field dimension does not match grid".into()));
    }
    if !(state.u.grid().same_as(state.grid()) && state.h.grid().same_as(state.grid())) {
        return Err(SolverError::InvalidState("fields live on different grids".into()));
    }
    let (lo, hi) = (state.rho.min(), state.rho.max());
    if lo < 0.0 || hi > params.rho_bar {
        return Err(SolverError::InvalidState(format!(
            "density range [{lo}, {hi}] leaves [0, rho_bar = {}]",
            params.rho_bar
        )));
    }
    Ok(())
}

/// Stable step size for the explicit terms.
///
/// `safety * min(h / max|u|, h / max|H|, h sqrt(mean rho) / max|H|)`, capped
/// at `dt_max`, which is also the answer for a state at rest.
pub fn cfl_dt(state: &State, safety: f64, dt_max: f64) -> f64 {
    let h = state.grid().spacing();
    let umax = state.u.max_magnitude();
    let hmax = state.h.max_magnitude();
    let mut bound = f64::INFINITY;
    if umax > 0.0 {
        bound = bound.min(h / umax);
    }
    if hmax > 0.0 {
        bound = bound.min(h / hmax);
        bound = bound.min(h * state.rho.mean().max(0.0).sqrt() / hmax);
    }
    if bound.is_finite() {
        (safety * bound).min(dt_max)
    } else {
        dt_max
    }
}

/// Resolve a step-size policy for `state`.
pub fn choose_dt(state: &State, policy: &DtPolicy) -> f64 {
    match *policy {
        DtPolicy::Fixed { dt } => dt,
        DtPolicy::Cfl { safety, dt_max } => cfl_dt(state, safety, dt_max),
    }
}

/// Advance `state` by one step chosen by `policy`, default settings.
pub fn step(state: &State, params: &PhysicalParams, policy: &DtPolicy) -> Result<(State, StepReport), SolverError> {
    step_with(state, params, policy, &SolverSettings::default())
}

pub fn step_with(
    state: &State,
    params: &PhysicalParams,
    policy: &DtPolicy,
    settings: &SolverSettings,
) -> Result<(State, StepReport), SolverError> {
    policy.validate()?;
    let dt = choose_dt(state, policy);
    step_dt(state, params, dt, settings)
}

/// Advance by exactly `dt`.
pub fn step_dt(
    state: &State,
    params: &PhysicalParams,
    dt: f64,
    settings: &SolverSettings,
) -> Result<(State, StepReport), SolverError> {
    validate_inputs(state, params, dt)?;
    let mut report = StepReport { dt_used: dt, ..StepReport::default() };
    report.cfl = advective_cfl(&state.u, dt);
    if report.cfl > settings.cfl_cap {
        return Err(SolverError::Cfl { cfl: report.cfl, cap: settings.cfl_cap });
    }
    let rho_half = advect_density(&state.rho, &state.u, 0.5 * dt, settings.cfl_cap, (0.0, params.rho_bar))?;
    let flow = advance_flow(&rho_half, &state.u, &state.h, &state.p, dt, params, settings, Mode::Coupled, &mut report)?;
    report.cfl = report.cfl.max(advective_cfl(&flow.u, dt));
    let rho = advect_density(&rho_half, &flow.u, 0.5 * dt, settings.cfl_cap, (0.0, params.rho_bar))?;
    let next = State { t: state.t + dt, rho, u: flow.u, h: flow.h, p: flow.p }.canonical();
    check_finite(&next)?;
    Ok((next, report))
}

/// Momentum update alone: `state.rho` is the (already advanced) density
/// coefficient and the magnetic field is held fixed.
pub fn step_momentum(
    state: &State,
    dt: f64,
    params: &PhysicalParams,
) -> Result<(VectorField, ScalarField, StepReport), SolverError> {
    validate_inputs(state, params, dt)?;
    let settings = SolverSettings::default();
    let mut report = StepReport { dt_used: dt, cfl: advective_cfl(&state.u, dt), ..StepReport::default() };
    let flow = advance_flow(
        &state.rho,
        &state.u,
        &state.h,
        &state.p,
        dt,
        params,
        &settings,
        Mode::MomentumOnly,
        &mut report,
    )?;
    Ok((flow.u.canonical(), flow.p.canonical(), report))
}

/// Induction update alone in the frozen velocity `u_new`.
pub fn step_induction(
    state: &State,
    u_new: &VectorField,
    dt: f64,
    params: &PhysicalParams,
) -> Result<VectorField, SolverError> {
    validate_inputs(state, params, dt)?;
    if !u_new.grid().same_as(state.grid()) || u_new.dim() != state.grid().dim() {
        return Err(SolverError::InvalidState("velocity does not match the state grid".into()));
    }
    let mut report = StepReport::default();
    let flow = advance_flow(
        &state.rho,
        u_new,
        &state.h,
        &state.p,
        dt,
        params,
        &SolverSettings::default(),
        Mode::InductionOnly,
        &mut report,
    )?;
    Ok(flow.h.canonical())
}
