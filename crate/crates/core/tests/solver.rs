use std::f64::consts::PI;
use std::sync::Arc;

use mhdcrit::experiments::{generate_initial, random_solenoidal, DensityProfile, Family, GridSpec, InitialData};
use mhdcrit::field::norms::{vector_inner_product, vector_l2_norm, vector_l2_norm_sq};
use mhdcrit::field::{advective_derivative, curl};
use mhdcrit::solver::{
    advect_density, cfl_dt, step, step_dt, step_induction, step_momentum, DtPolicy, PhysicalParams, SolverError,
    SolverSettings, State,
};
use mhdcrit::{Grid, ScalarField, VectorField};

fn grid(n: usize) -> Arc<Grid> {
    Grid::new(2, n, 2.0 * PI).unwrap()
}

fn taylor_green(g: &Arc<Grid>, a: f64) -> VectorField {
    VectorField::from_fn(g, |x| [a * x[0].sin() * x[1].cos(), -a * x[0].cos() * x[1].sin(), 0.0])
}

fn total_energy(s: &State) -> f64 {
    mhdcrit::diagnostics::total_energy(s)
}

#[test]
fn taylor_green_norm_decays_like_exp_minus_two_mu_t() {
    let g = grid(64);
    let mu = 0.05;
    let params = PhysicalParams::new(mu, 0.05, 1.0);
    let mut s = State::new(0.0, ScalarField::constant(&g, 1.0), taylor_green(&g, 1.0), VectorField::zeros(&g));
    let n0 = vector_l2_norm(&s.u);
    let horizon = 2.0;
    while s.t < horizon - 1e-12 {
        let dt = cfl_dt(&s, 0.5, 0.05).min(horizon - s.t);
        s = step_dt(&s, &params, dt, &SolverSettings::default()).unwrap().0;
        assert!(s.div_u_relative() <= 1e-11);
    }
    let ratio = vector_l2_norm(&s.u) / n0;
    assert!((ratio - (-2.0 * mu * horizon).exp()).abs() <= 1e-6, "ratio {ratio}");
}

#[test]
fn pure_gradient_lorentz_force_is_absorbed_by_pressure() {
    // (H.grad)H of a Taylor-Green magnetic field is a gradient
    let g = grid(32);
    let params = PhysicalParams::new(0.1, 0.1, 1.0);
    let s = State::new(0.0, ScalarField::constant(&g, 1.0), VectorField::zeros(&g), taylor_green(&g, 1.0));
    let (u, _p, report) = step_momentum(&s, 0.05, &params).unwrap();
    assert!(u.max_magnitude() <= 1e-11, "{}", u.max_magnitude());
    assert!(report.pressure_residual <= SolverSettings::default().pressure_tol);

    let mut s = s;
    for _ in 0..20 {
        s = step(&s, &params, &DtPolicy::Fixed { dt: 0.05 }).unwrap().0;
    }
    assert!(s.u.max_magnitude() <= 1e-11);
}

#[test]
fn projection_leaves_random_steps_solenoidal() {
    let g = grid(32);
    let u = random_solenoidal(&g, 3, 1.0, 3.0, Some(8), 1.0).unwrap();
    let h = random_solenoidal(&g, 4, 1.0, 3.0, Some(8), 1.0).unwrap();
    let rho = ScalarField::from_fn(&g, |x| 0.6 + 0.4 * x[0].sin() * x[1].cos());
    let params = PhysicalParams::new(0.02, 0.02, 1.0);
    let s = State::new(0.0, rho, u, h);
    let (u_new, _, report) = step_momentum(&s, 0.02, &params).unwrap();
    assert!(mhdcrit::field::l2_norm(&mhdcrit::field::divergence(&u_new)) <= 1e-11 * vector_l2_norm(&u_new));
    assert!(report.pressure_residual <= SolverSettings::default().pressure_tol);
    let h_new = step_induction(&s, &u_new, 0.02, &params).unwrap();
    assert!(mhdcrit::field::l2_norm(&mhdcrit::field::divergence(&h_new)) <= 1e-11 * vector_l2_norm(&h_new));
}

#[test]
fn zero_magnetic_field_stays_zero() {
    let g = grid(16);
    let params = PhysicalParams::new(0.1, 0.1, 1.0);
    let s = State::new(0.0, ScalarField::constant(&g, 1.0), taylor_green(&g, 1.0), VectorField::zeros(&g));
    let h = step_induction(&s, &s.u, 0.05, &params).unwrap();
    assert!(h.is_zero());
}

fn induction_balance(u: &VectorField, lambda: f64, horizon: f64, cfl: f64) -> (f64, f64, f64) {
    let g = u.grid().clone();
    let params = PhysicalParams::new(0.01, lambda, 1.0);
    let h0 = random_solenoidal(&g, 9, 1.0, 1.5, Some(4), 0.5).unwrap();
    let mut s = State::new(0.0, ScalarField::constant(&g, 1.0), u.clone(), h0);
    let source = |h: &VectorField| vector_inner_product(&advective_derivative(h, u), h) - lambda * curl(h).norm_sq();
    let e0 = 0.5 * vector_l2_norm_sq(&s.h);
    let steps = (horizon / (cfl * g.spacing() / u.max_magnitude())).ceil() as usize;
    let dt = horizon / steps as f64;
    let mut predicted = e0;
    let mut prev_source = source(&s.h);
    for _ in 0..steps {
        let h = step_induction(&s, u, dt, &params).unwrap();
        let next_source = source(&h);
        predicted += 0.5 * dt * (prev_source + next_source);
        prev_source = next_source;
        s = State { t: s.t + dt, h, ..s };
    }
    (e0, 0.5 * vector_l2_norm_sq(&s.h), predicted)
}

#[test]
fn ideal_induction_conserves_magnetic_energy_in_rigid_motion() {
    let g = grid(64);
    let u = VectorField::from_fn(&g, |_| [1.0, 0.5, 0.0]);
    // one turnover L / |u| at CFL 0.25
    let (e0, e, _) = induction_balance(&u, 1e-9, 2.0 * PI / 1.25f64.sqrt(), 0.25);
    assert!((e - e0).abs() <= 1e-4 * e0, "{e} vs {e0}");
}

#[test]
fn induction_energy_balance_in_a_cellular_flow() {
    // stretching by a frozen Taylor-Green flow; the balance defect is a
    // second-order time error
    let u = taylor_green(&grid(64), 1.0);
    let defect = |cfl| {
        let (_, e, predicted) = induction_balance(&u, 1e-6, 1.0, cfl);
        (e - predicted).abs() / e
    };
    let (coarse, fine) = (defect(0.5), defect(0.25));
    assert!(fine <= 1e-4, "{fine}");
    assert!((3.2..=4.8).contains(&(coarse / fine)), "{coarse} / {fine}");
}

#[test]
fn rest_state_is_unchanged_except_time() {
    let g = grid(16);
    let rho = ScalarField::from_fn(&g, |x| 0.5 + 0.25 * (x[0] + x[1]).sin().powi(2));
    let s = State::new(0.3, rho, VectorField::zeros(&g), VectorField::zeros(&g));
    let params = PhysicalParams::new(0.1, 0.1, 1.0);
    let (next, report) = step(&s, &params, &DtPolicy::default()).unwrap();
    assert_eq!(report.dt_used, 0.05);
    assert_eq!(next.t, 0.3 + 0.05);
    assert_eq!(next.rho.values(), s.rho.values());
    assert!(next.u.is_zero() && next.h.is_zero());
}

#[test]
fn cfl_examples() {
    let g = grid(64);
    let rest = State::new(0.0, ScalarField::constant(&g, 1.0), VectorField::zeros(&g), VectorField::zeros(&g));
    assert_eq!(cfl_dt(&rest, 0.5, 0.05), 0.05);
    let tg = State { u: taylor_green(&g, 1.0), ..rest.clone() };
    let dt = cfl_dt(&tg, 0.5, 1.0);
    assert!((dt - 0.5 * (2.0 * PI / 64.0)).abs() < 1e-12);
    let fast = State { u: taylor_green(&g, 2.0), ..rest.clone() };
    assert!((cfl_dt(&fast, 0.5, 1.0) - 0.5 * dt).abs() < 1e-12);
    assert!(cfl_dt(&tg, 0.25, 1.0) < dt);
}

#[test]
fn vacuum_disk_keeps_exact_bounds_under_transport() {
    let data = InitialData {
        family: Family::TaylorGreen,
        amplitude_u: 1.0,
        amplitude_h: 0.0,
        density: DensityProfile::VacuumDisk { radius: PI / 4.0, rho_bar: 1.0, band: None },
        grid: GridSpec::new(2, 64),
    };
    let s = generate_initial(&data).unwrap();
    let mut rho = s.rho.clone();
    for _ in 0..50 {
        rho = advect_density(&rho, &s.u, 0.05, 5.0, (0.0, 1.0)).unwrap();
        assert!(rho.min() == 0.0 && rho.max() <= 1.0);
    }
}

#[test]
fn out_of_range_density_is_rejected() {
    let g = grid(16);
    let s = State::new(0.0, ScalarField::constant(&g, 2.0), VectorField::zeros(&g), VectorField::zeros(&g));
    let err = step(&s, &PhysicalParams::new(0.1, 0.1, 1.0), &DtPolicy::default()).unwrap_err();
    assert!(matches!(err, SolverError::InvalidState(_)));
}

#[test]
fn excessive_cfl_is_a_rejection() {
    let g = grid(16);
    let s = State::new(0.0, ScalarField::constant(&g, 1.0), taylor_green(&g, 1.0), VectorField::zeros(&g));
    let err = step(&s, &PhysicalParams::new(0.1, 0.1, 1.0), &DtPolicy::Fixed { dt: 10.0 }).unwrap_err();
    assert!(matches!(err, SolverError::Cfl { .. }));
}

#[test]
fn total_energy_is_non_increasing_on_a_resolved_run() {
    let data = InitialData {
        family: Family::Combined,
        amplitude_u: 1.0,
        amplitude_h: 0.5,
        density: DensityProfile::Constant { rho_bar: 1.0 },
        grid: GridSpec::new(2, 32),
    };
    let mut s = generate_initial(&data).unwrap();
    let params = PhysicalParams::new(0.05, 0.05, 1.0);
    let e0 = total_energy(&s);
    for _ in 0..40 {
        let next = step(&s, &params, &DtPolicy::default()).unwrap().0;
        assert!(total_energy(&next) <= total_energy(&s) + 1e-8 * e0);
        s = next;
    }
}

#[test]
fn trajectories_are_deterministic() {
    let data = InitialData {
        family: Family::RandomSolenoidal { seed: 42, slope: 1.0, cutoff: 2.0, kmax: Some(6) },
        amplitude_u: 1.0,
        amplitude_h: 1.0,
        density: DensityProfile::SmoothBump { min: 0.4, max: 1.0 },
        grid: GridSpec::new(2, 24),
    };
    let params = PhysicalParams::new(0.05, 0.05, 1.0);
    let run = || {
        let mut s = generate_initial(&data).unwrap();
        for _ in 0..10 {
            s = step(&s, &params, &DtPolicy::default()).unwrap().0;
        }
        s
    };
    let (a, b) = (run(), run());
    assert_eq!(a.t, b.t);
    for ((_, x), (_, y)) in a.named_fields().iter().zip(b.named_fields()) {
        assert_eq!(x.values(), y.values());
    }
}
