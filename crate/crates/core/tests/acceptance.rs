//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p mhdcrit --test acceptance -- --nocapture` to see the table.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Stdio};

use mhdcrit::diagnostics::{cross_term_check, cross_term_scale};
use mhdcrit::experiments::{
    check_cross_term, check_density_translation, check_energy_identity, check_heat_decay, check_scaling,
    check_taylor_green, generate_initial, random_solenoidal, run_sweep, CheckResult, DensityProfile, Family,
    GridSpec, InitialData, SweepConfig, SweepResult, Thresholds,
};
use mhdcrit::field::norms::vector_l2_norm;
use mhdcrit::field::{curl, divergence, gradient, laplacian, Curl};
use mhdcrit::solver::{advect_density, cfl_dt, DtPolicy, PhysicalParams, SolverSettings, State};
use mhdcrit::{Grid, ScalarField, VectorField};

struct Line {
    id: u32,
    name: &'static str,
    ok: bool,
    detail: String,
}

fn report(lines: &mut Vec<Line>, id: u32, name: &'static str, ok: bool, detail: String) {
    println!("{} {id:>2} {name:<22} {detail}", if ok { "PASS" } else { "FAIL" });
    lines.push(Line { id, name, ok, detail });
}

fn from_check(lines: &mut Vec<Line>, id: u32, name: &'static str, r: &CheckResult) {
    report(lines, id, name, r.passed(), format!("value {:.3e} (tolerance {}) {}", r.value, r.tolerance, r.detail));
}

fn max_abs_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn spectral_calculus() -> (bool, String) {
    let g = Grid::new(2, 64, 2.0 * PI).unwrap();
    let f = ScalarField::from_fn(&g, |x| (3.0 * x[0]).sin() * (2.0 * x[1]).cos());
    let fx = ScalarField::from_fn(&g, |x| 3.0 * (3.0 * x[0]).cos() * (2.0 * x[1]).cos());
    let fy = ScalarField::from_fn(&g, |x| -2.0 * (3.0 * x[0]).sin() * (2.0 * x[1]).sin());
    let lap = f.scale(-13.0);
    let grad = gradient(&f);
    let e_grad = max_abs_diff(grad.component(0), &fx).max(max_abs_diff(grad.component(1), &fy));
    let e_lap = max_abs_diff(&laplacian(&f), &lap);

    let g3 = Grid::new(3, 32, 2.0 * PI).unwrap();
    let v = random_solenoidal(&g3, 5, 1.0, 3.0, Some(8), 1.0).unwrap();
    let w = VectorField::from_fn(&g3, |x| [x[1].sin() * x[2].cos(), (2.0 * x[2]).cos() * x[0].sin(), (x[0] + x[1]).sin()]);
    let v = v.add(&w);
    let Curl::Vector(c) = curl(&v) else { unreachable!() };
    let e_dc = mhdcrit::field::norms::l2_norm(&divergence(&c)) / vector_l2_norm(&c);
    let ok = e_grad <= 1e-12 && e_lap <= 1e-12 && e_dc <= 1e-12;
    (ok, format!("grad {e_grad:.2e}, laplacian {e_lap:.2e} (abs <= 1e-12); div curl {e_dc:.2e} (rel <= 1e-12)"))
}

/// Vacuum disk carried by a frozen Taylor-Green flow, `t = 10 L / U`.
fn max_principle() -> (bool, String, f64) {
    let data = InitialData {
        family: Family::TaylorGreen,
        amplitude_u: 1.0,
        amplitude_h: 0.0,
        density: DensityProfile::VacuumDisk { radius: PI / 4.0, rho_bar: 1.0, band: None },
        grid: GridSpec::new(2, 64),
    };
    let s = generate_initial(&data).unwrap();
    let horizon = 10.0 * 2.0 * PI / s.u.max_magnitude();
    let dt0 = cfl_dt(&s, 0.5, 1.0);
    let steps = (horizon / dt0).ceil() as usize;
    let dt = horizon / steps as f64;
    let mut rho = s.rho.clone();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..steps {
        rho = advect_density(&rho, &s.u, dt, 5.0, (0.0, 1.0)).unwrap();
        lo = lo.min(rho.min());
        hi = hi.max(rho.max());
    }
    let div = mhdcrit::field::norms::l2_norm(&divergence(&s.u)) / vector_l2_norm(&s.u);
    (lo >= 0.0 && hi <= 1.0, format!("{steps} steps to t = {horizon:.3}: min {lo:e}, max {hi:e} (bounds 0, 1)"), div)
}

/// Defect on random fields whose spectrum reaches past the 2/3 cutoff of
/// n = 64 but not of n = 96.
fn cross_term_refinement() -> (bool, String) {
    let defect = |n: usize| {
        let g = Grid::new(2, n, 2.0 * PI).unwrap();
        let u = random_solenoidal(&g, 11, 0.0, 6.0, None, 1.0).unwrap();
        let h = random_solenoidal(&g, 12, 0.0, 6.0, None, 1.0).unwrap();
        let s = State::new(0.0, ScalarField::constant(&g, 1.0), u, h);
        cross_term_check(&s).abs() / cross_term_scale(&s)
    };
    let (a, b) = (defect(64), defect(96));
    (a <= 1e-8 && b <= 1e-8 && b < a, format!("n=64 {a:.3e}, n=96 {b:.3e} (<= 1e-8, decreasing)"))
}

fn ladder_config(floor: f64, amplitudes: Vec<f64>) -> SweepConfig {
    SweepConfig {
        base: InitialData {
            family: Family::Combined,
            amplitude_u: 1.0,
            amplitude_h: 1.0,
            density: DensityProfile::VacuumDisk { radius: PI / 4.0, rho_bar: 1.0, band: None },
            grid: GridSpec::new(3, 32),
        },
        amplitudes,
        params: PhysicalParams::new(1.0, 1.0, 1.0).with_floor(floor),
        horizon: 1.0,
        policy: DtPolicy::default(),
        settings: SolverSettings::default(),
        thresholds: Thresholds::default(),
        workers: 1,
        stride: 1,
    }
}

fn lemma23_ladder(r: &SweepResult) -> (bool, String) {
    let decay: Vec<_> = r.rows.iter().filter(|row| row.classification.as_str() == "decay").collect();
    let ok = !decay.is_empty()
        && r.rows.iter().all(|row| row.error.is_none())
        && decay.iter().all(|row| row.bound_ok && row.blowup_ok());
    let rows: Vec<String> = r
        .rows
        .iter()
        .map(|row| {
            format!(
                "a={} {} maxG/G0={:.3} int/bound={:.2e}",
                row.amplitude,
                row.classification.as_str(),
                row.max_grad_energy / row.g0,
                row.blowup_int / row.blowup_bound
            )
        })
        .collect();
    (ok, format!("{} decay rows; {}", decay.len(), rows.join("; ")))
}

fn reproducibility(tmp: &Path) -> (bool, String) {
    let cfg = tmp.join("run.toml");
    fs::write(
        &cfg,
        r#"
horizon = 0.6
checkpoint_stride = 5
[grid]
dim = 2
n = 32
[params]
mu = 0.05
lambda = 0.05
rho_bar = 1.0
[initial]
family = { kind = "random_solenoidal", seed = 7, slope = 1.0, cutoff = 3.0, kmax = 8 }
amplitude_u = 1.0
amplitude_h = 0.8
density = { kind = "vacuum_disk", radius = 0.785, rho_bar = 1.0 }
"#,
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_mhdcrit");
    let run = |args: &[&str]| Command::new(bin).args(args).env_remove("MHDCRIT_THREADS").stdout(Stdio::null()).status().unwrap().success();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let (full, part) = (tmp.join("full"), tmp.join("part"));
    let mut ok = run(&["run", "--config", &s(&cfg), "--out", &s(&full)]);
    fs::create_dir_all(part.join("checkpoints")).unwrap();
    fs::copy(full.join("ledger.ndjson"), part.join("ledger.ndjson")).unwrap();
    for f in ["ckpt_00000005.snap", "ckpt_00000005.json"] {
        fs::copy(full.join("checkpoints").join(f), part.join("checkpoints").join(f)).unwrap();
    }
    let ck = part.join("checkpoints/ckpt_00000005.snap");
    ok &= run(&["run", "--config", &s(&cfg), "--out", &s(&part), "--resume", &s(&ck)]);
    let snaps = |d: &Path| {
        let mut v: Vec<_> = fs::read_dir(d.join("checkpoints"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|e| e == "snap"))
            .collect();
        v.sort();
        v.last().cloned().unwrap()
    };
    let same_ledger = fs::read(full.join("ledger.ndjson")).ok() == fs::read(part.join("ledger.ndjson")).ok();
    let same_state = fs::read(snaps(&full)).unwrap() == fs::read(snaps(&part)).unwrap();
    let diag = run(&["diag", &s(&full)]);

    let sweep = SweepConfig {
        amplitudes: vec![0.5, 1.0, 2.0],
        horizon: 0.3,
        base: InitialData {
            family: Family::RandomSolenoidal { seed: 3, slope: 1.0, cutoff: 2.0, kmax: Some(5) },
            grid: GridSpec::new(2, 16),
            ..ladder_config(1e-3, vec![]).base
        },
        ..ladder_config(1e-3, vec![])
    };
    let a = run_sweep(&sweep).unwrap();
    let b = run_sweep(&SweepConfig { workers: 2, ..sweep.clone() }).unwrap();
    let same_sweep = a.to_csv() == b.to_csv();
    ok &= same_ledger && same_state && diag && same_sweep;
    (
        ok,
        format!(
            "resume ledger identical {same_ledger}, final snapshot identical {same_state}, diag {diag}, sweep identical {same_sweep}"
        ),
    )
}

#[test]
fn acceptance() {
    let mut lines = Vec::new();
    let mut max_div: f64 = 0.0;

    let (ok, d) = spectral_calculus();
    report(&mut lines, 1, "spectral_calculus", ok, d);

    let tg = check_taylor_green(64, true).unwrap();
    from_check(&mut lines, 2, "taylor_green", &tg);
    let heat = check_heat_decay(64, true).unwrap();
    from_check(&mut lines, 3, "magnetic_heat_decay", &heat);
    let energy = check_energy_identity(192, true, true).unwrap();
    from_check(&mut lines, 4, "energy_identity", &energy);
    max_div = max_div.max(tg.max_divergence).max(heat.max_divergence).max(energy.max_divergence);

    let (ok, d, div) = max_principle();
    let translation = check_density_translation(64, true).unwrap();
    let ok = ok && translation.passed();
    report(&mut lines, 5, "max_principle", ok, format!("{d}; translation error {:.3e}", translation.value));
    max_div = max_div.max(div);

    let evolved = check_cross_term(64, true).unwrap();
    let (ok, d) = cross_term_refinement();
    report(&mut lines, 6, "cross_term", ok && evolved.passed(), format!("{d}; evolved {:.3e}", evolved.value));
    max_div = max_div.max(evolved.max_divergence);

    let scaling = check_scaling().unwrap();
    from_check(&mut lines, 7, "scaling_invariance", &scaling);

    let amps: Vec<f64> = [-6, -4, -2, 0, 2].iter().map(|&k| 2f64.powi(k)).collect();
    let ladder = run_sweep(&ladder_config(1e-2, amps.clone())).unwrap();
    let smallest = run_sweep(&ladder_config(1e-3, amps[..1].to_vec())).unwrap();
    let (ok_a, d) = lemma23_ladder(&ladder);
    let (ok_b, d_b) = lemma23_ladder(&smallest);
    let (r1, r2) = (&ladder.rows[0], &smallest.rows[0]);
    let sensitivity = (r1.blowup_int - r2.blowup_int).abs() / r2.blowup_int;
    report(
        &mut lines,
        8,
        "lemma23_bound",
        ok_a && ok_b,
        format!("floor 1e-2: {d}. floor 1e-3 repeat: {d_b}; blow-up integral relative change {sensitivity:.2e}"),
    );
    for row in ladder.rows.iter().chain(&smallest.rows) {
        max_div = max_div.max(row.max_div);
    }

    report(&mut lines, 9, "solenoidality", max_div <= 1e-11, format!("max relative divergence {max_div:.3e} (<= 1e-11)"));

    let tmp = tempfile::tempdir().unwrap();
    let (ok, d) = reproducibility(tmp.path());
    report(&mut lines, 10, "reproducibility", ok, d);

    let failed: Vec<String> = lines.iter().filter(|l| !l.ok).map(|l| format!("{} {}: {}", l.id, l.name, l.detail)).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
