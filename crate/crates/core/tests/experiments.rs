use std::f64::consts::PI;

use mhdcrit::diagnostics::{critical_quantity, scaling_transform, TrajectoryLedger};
use mhdcrit::experiments::{
    classify_trajectory, generate_initial, run_sweep, run_trajectory, run_verification_suite, Classification,
    CheckStatus, DensityProfile, Family, GridSpec, InitialData, RunOptions, SweepConfig, Thresholds,
    VerificationConfig,
};
use mhdcrit::field::divergence;
use mhdcrit::field::norms::{l2_norm, vector_l2_norm};
use mhdcrit::solver::{DtPolicy, PhysicalParams, SolverSettings};

fn combined(dim: usize, n: usize) -> InitialData {
    InitialData {
        family: Family::Combined,
        amplitude_u: 1.0,
        amplitude_h: 0.5,
        density: DensityProfile::VacuumDisk { radius: PI / 4.0, rho_bar: 1.0, band: None },
        grid: GridSpec::new(dim, n),
    }
}

fn sweep(base: InitialData, amplitudes: Vec<f64>, horizon: f64) -> SweepConfig {
    SweepConfig {
        base,
        amplitudes,
        params: PhysicalParams::new(1.0, 1.0, 1.0),
        horizon,
        policy: DtPolicy::default(),
        settings: SolverSettings::default(),
        thresholds: Thresholds::default(),
        workers: 1,
        stride: 1,
    }
}

#[test]
fn taylor_green_of_zero_amplitude_is_rest() {
    let data = InitialData { amplitude_u: 0.0, amplitude_h: 0.0, family: Family::TaylorGreen, ..combined(2, 16) };
    let s = generate_initial(&data).unwrap();
    assert!(s.u.is_zero() && s.h.is_zero());
    assert_eq!(s.t, 0.0);
}

#[test]
fn vacuum_disk_has_an_empty_region_and_reaches_rho_bar() {
    let s = generate_initial(&combined(2, 64)).unwrap();
    assert_eq!(s.rho.min(), 0.0);
    assert_eq!(s.rho.max(), 1.0);
    let vacuum = s.rho.values().iter().filter(|&&r| r == 0.0).count() as f64 / s.rho.values().len() as f64;
    // disk of radius pi/4 in a (2 pi)^2 box
    let area = PI / 64.0;
    assert!((vacuum - area).abs() < 0.2 * area, "{vacuum} vs {area}");
    let band = s.rho.values().iter().filter(|&&r| r > 0.0 && r < 1.0).count();
    assert!(band > 0);
}

#[test]
fn generated_fields_are_solenoidal_and_seeded() {
    for dim in [2, 3] {
        let data = InitialData {
            family: Family::RandomSolenoidal { seed: 7, slope: 1.0, cutoff: 2.0, kmax: Some(5) },
            amplitude_u: 1.0,
            amplitude_h: 0.7,
            density: DensityProfile::SmoothBump { min: 0.2, max: 1.0 },
            grid: GridSpec::new(dim, if dim == 2 { 32 } else { 16 }),
        };
        let a = generate_initial(&data).unwrap();
        let b = generate_initial(&data).unwrap();
        for ((_, x), (_, y)) in a.named_fields().iter().zip(b.named_fields()) {
            assert_eq!(x.values(), y.values());
        }
        assert!(l2_norm(&divergence(&a.u)) <= 1e-12 * vector_l2_norm(&a.u));
        assert!(l2_norm(&divergence(&a.h)) <= 1e-12 * vector_l2_norm(&a.h));
        assert!(a.rho.min() >= 0.0 && a.rho.max() <= 1.0);
    }
}

#[test]
fn invalid_family_parameters_are_rejected() {
    let bad = [
        InitialData { density: DensityProfile::VacuumDisk { radius: -1.0, rho_bar: 1.0, band: None }, ..combined(2, 16) },
        InitialData { density: DensityProfile::SmoothBump { min: 0.8, max: 0.2 }, ..combined(2, 16) },
        InitialData { amplitude_u: f64::NAN, ..combined(2, 16) },
        InitialData { grid: GridSpec::new(2, 7), ..combined(2, 16) },
    ];
    for d in bad {
        assert!(generate_initial(&d).is_err(), "{d:?}");
    }
}

#[test]
fn classification_of_simple_trajectories() {
    let t = Thresholds::default();
    let params = PhysicalParams::new(1.0, 1.0, 1.0);

    let rest = InitialData { amplitude_u: 0.0, amplitude_h: 0.0, ..combined(2, 16) };
    let out = run_trajectory(generate_initial(&rest).unwrap(), &params, &RunOptions::new(0.5)).unwrap();
    assert_eq!(classify_trajectory(&out.ledger, out.horizon_reached(0.5), false, &t).unwrap(), Classification::Decay);

    // G(t) = G0 exp(-2 lambda t) with lambda = 1, below 0.1 G0 by t = 2
    let heat = InitialData {
        family: Family::SingleModeMagnetic,
        amplitude_u: 0.0,
        amplitude_h: 1.0,
        density: DensityProfile::Constant { rho_bar: 1.0 },
        grid: GridSpec::new(2, 16),
    };
    let out = run_trajectory(generate_initial(&heat).unwrap(), &params, &RunOptions::new(2.0)).unwrap();
    assert!(out.error.is_none());
    assert_eq!(classify_trajectory(&out.ledger, true, false, &t).unwrap(), Classification::Decay);
    // the same ledger before the horizon is not yet decay
    assert_eq!(classify_trajectory(&out.ledger, false, false, &t).unwrap(), Classification::Inconclusive);
    assert_eq!(classify_trajectory(&out.ledger, true, true, &t).unwrap(), Classification::Growth);

    let mut grown = out.ledger.clone();
    let g0 = grown.acc.g0;
    let last = grown.records.last_mut().unwrap();
    last.grad_u = 0.0;
    last.grad_h = 200.0 * g0;
    assert_eq!(classify_trajectory(&grown, true, false, &t).unwrap(), Classification::Growth);
    grown.records.last_mut().unwrap().grad_h = 2.0 * g0;
    assert_eq!(classify_trajectory(&grown, true, false, &t).unwrap(), Classification::Inconclusive);

    let empty = TrajectoryLedger::resume(out.ledger.acc.clone());
    assert!(classify_trajectory(&empty, true, false, &t).is_err());
}

#[test]
fn zero_amplitude_sweep_is_one_decay_row() {
    let r = run_sweep(&sweep(combined(2, 16), vec![0.0], 0.5)).unwrap();
    assert_eq!(r.rows.len(), 1);
    assert_eq!(r.rows[0].classification, Classification::Decay);
    assert_eq!(r.rows[0].q0, 0.0);
    assert!(r.rows[0].error.is_none());
    assert_eq!(r.largest_decay_q0, Some(0.0));
}

#[test]
fn invalid_amplitude_lists_are_rejected() {
    for amps in [vec![], vec![1.0, 0.5], vec![0.5, 0.5], vec![-1.0], vec![f64::INFINITY]] {
        assert!(run_sweep(&sweep(combined(2, 16), amps.clone(), 0.5)).is_err(), "{amps:?}");
    }
    let mut cfg = sweep(combined(2, 16), vec![1.0], 0.5);
    cfg.horizon = 0.0;
    assert!(run_sweep(&cfg).is_err());
}

#[test]
fn q0_follows_the_quartic_law_and_decay_rows_keep_the_bound() {
    let amps: Vec<f64> = (-6..=2).step_by(2).map(|k| 2f64.powi(k)).collect();
    let r = run_sweep(&sweep(combined(2, 16), amps.clone(), 0.5)).unwrap();
    let unit = r.rows.iter().find(|row| row.amplitude == 1.0).unwrap().q0;
    for (row, a) in r.rows.iter().zip(&amps) {
        assert_eq!(row.amplitude, *a);
        assert!(row.error.is_none(), "{:?}", row.error);
        assert!((row.q0 - unit * a.powi(4)).abs() <= 1e-8 * unit * a.powi(4), "a = {a}");
        if row.classification == Classification::Decay {
            assert!(row.bound_ok && row.max_grad_energy <= 4.0 * row.g0);
        }
    }
    assert!(r.rows.windows(2).all(|w| w[0].q0 < w[1].q0));
}

#[test]
fn sweeps_are_deterministic_across_worker_counts() {
    let mut cfg = sweep(combined(2, 16), vec![0.25, 1.0, 4.0], 0.3);
    let a = run_sweep(&cfg).unwrap();
    cfg.workers = 3;
    let b = run_sweep(&cfg).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.summary_json(), b.summary_json());
}

#[test]
fn scaled_initial_data_leaves_q0_unchanged_in_3d() {
    let base = combined(3, 16);
    // u -> 2 u(2x), H -> 2 H(2x) on a box of half the length
    let scaled = InitialData {
        amplitude_u: 2.0 * base.amplitude_u,
        amplitude_h: 2.0 * base.amplitude_h,
        density: DensityProfile::VacuumDisk { radius: PI / 8.0, rho_bar: 1.0, band: Some(PI / 16.0) },
        grid: GridSpec { box_length: PI, ..base.grid },
        ..base
    };
    let direct = scaling_transform(&generate_initial(&base).unwrap(), 2.0).unwrap();
    let generated = generate_initial(&scaled).unwrap();
    let q = critical_quantity(&direct);
    assert!((critical_quantity(&generated) - q).abs() <= 1e-8 * q);

    let amps = vec![0.5, 1.0];
    let mut cfg = sweep(base, amps.clone(), 0.02);
    cfg.policy = DtPolicy::Fixed { dt: 0.01 };
    let a = run_sweep(&cfg).unwrap();
    cfg.base = scaled;
    cfg.policy = DtPolicy::Fixed { dt: 0.0025 };
    cfg.horizon = 0.005;
    let b = run_sweep(&cfg).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!((x.q0 - y.q0).abs() <= 1e-8 * x.q0, "{} vs {}", x.q0, y.q0);
    }
}

#[test]
fn classifications_agree_under_refinement_in_2d() {
    let amps = vec![0.125, 0.5, 2.0];
    let coarse = run_sweep(&sweep(combined(2, 16), amps.clone(), 5.0)).unwrap();
    let fine = run_sweep(&sweep(combined(2, 32), amps, 5.0)).unwrap();
    for (c, f) in coarse.rows.iter().zip(&fine.rows) {
        assert_eq!(c.classification, f.classification, "a = {}", c.amplitude);
    }
}

#[test]
fn under_resolved_suite_is_inconclusive_not_failed() {
    let cfg = VerificationConfig { n: 16, ..Default::default() };
    let report = run_verification_suite(&cfg).unwrap();
    assert_eq!(report.checks.len(), 7);
    for c in &report.checks {
        assert_ne!(c.status, CheckStatus::Fail, "{c:?}");
    }
    assert!(report.ok());
    assert!(report.checks.iter().any(|c| c.status == CheckStatus::Inconclusive));
}

#[test]
fn broken_dealiasing_fails_only_the_cross_term_check() {
    let cfg = VerificationConfig {
        n: 64,
        dealias: false,
        checks: vec!["cross_term_defect".into(), "scaling_invariance".into()],
        ..Default::default()
    };
    let report = run_verification_suite(&cfg).unwrap();
    assert_eq!(report.get("cross_term_defect").unwrap().status, CheckStatus::Fail);
    assert!(report.get("scaling_invariance").unwrap().passed());
    assert_eq!(report.failing(), vec!["cross_term_defect"]);
    assert!(!report.ok());
}
