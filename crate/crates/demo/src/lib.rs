//! Browser demo: a 2D vacuum-disk run drawn on a canvas, with live
//! diagnostics and the initial critical quantity across an amplitude ladder.

use std::f64::consts::PI;

use mhdcrit::diagnostics::export::record_to_json;
use mhdcrit::diagnostics::{blowup_criterion, critical_quantity, lemma23_functionals, TrajectoryLedger};
use mhdcrit::experiments::{generate_initial, next_dt, DensityProfile, Family, GridSpec, InitialData};
use mhdcrit::field::{curl, Curl};
use mhdcrit::solver::{step_dt, DtPolicy, PhysicalParams, SolverSettings, State};
use mhdcrit::ScalarField;
use wasm_bindgen::prelude::*;

fn initial_data(n: usize, amplitude: f64, vacuum: bool) -> InitialData {
    let density = if vacuum {
        DensityProfile::VacuumDisk { radius: PI / 4.0, rho_bar: 1.0, band: None }
    } else {
        DensityProfile::SmoothBump { min: 0.5, max: 1.0 }
    };
    InitialData { family: Family::Combined, amplitude_u: amplitude, amplitude_h: amplitude, density, grid: GridSpec::new(2, n) }
}

#[wasm_bindgen]
pub struct Simulation {
    state: State,
    params: PhysicalParams,
    policy: DtPolicy,
    ledger: TrajectoryLedger,
    steps: usize,
}

#[wasm_bindgen]
impl Simulation {
    /// Taylor-Green velocity plus a magnetic shear mode, both of size
    /// `amplitude`, on an `n x n` grid.
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, amplitude: f64, mu: f64, lambda: f64, vacuum: bool) -> Result<Simulation, String> {
        let params = PhysicalParams::new(mu, lambda, 1.0).with_floor(1e-2);
        params.validate().map_err(|e| e.to_string())?;
        let state = generate_initial(&initial_data(n, amplitude, vacuum)).map_err(|e| e.to_string())?;
        let ledger = TrajectoryLedger::new(&state);
        Ok(Simulation { state, params, policy: DtPolicy::default(), ledger, steps: 0 })
    }

    /// Advance `count` CFL-limited steps.
    pub fn step(&mut self, count: usize) -> Result<(), String> {
        for _ in 0..count {
            let dt = next_dt(&self.state, &self.policy, f64::INFINITY);
            let (next, _) = step_dt(&self.state, &self.params, dt, &SolverSettings::default()).map_err(|e| e.to_string())?;
            self.ledger.observe(&self.state, &next, dt, &self.params, true).map_err(|e| e.to_string())?;
            self.state = next;
            self.steps += 1;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.state.rho.grid().n()
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Density on a grey scale from vacuum (black) to `rho_bar` (white).
    pub fn density_rgba(&self) -> Vec<u8> {
        rgba(&self.state.rho, |v| {
            let g = (255.0 * v.clamp(0.0, 1.0)).round() as u8;
            [g, g, g]
        })
    }

    /// Current density `curl H`, blue negative, red positive, scaled by its
    /// own maximum.
    pub fn current_rgba(&self) -> Vec<u8> {
        let Curl::Scalar(j) = curl(&self.state.h) else { unreachable!("the demo grid is 2D") };
        let m = j.max_abs().max(1e-300);
        rgba(&j, |v| {
            let s = (v / m).clamp(-1.0, 1.0);
            let k = (255.0 * (1.0 - s.abs())).round() as u8;
            if s >= 0.0 {
                [255, k, k]
            } else {
                [k, k, 255]
            }
        })
    }

    /// Latest ledger record as JSON, with the `E(t) <= 4 G0` flag and the
    /// blow-up integral appended.
    pub fn diagnostics_json(&self) -> String {
        let Some(rec) = self.ledger.last() else { return "{}".into() };
        let bound_ok = lemma23_functionals(&self.ledger).map(|l| l.bound_ok).unwrap_or(false);
        let blowup = blowup_criterion(&self.ledger).map(|b| b.1).unwrap_or(false);
        let mut json = record_to_json(rec);
        json.pop();
        format!("{json},\"g0\":{},\"bound_ok\":{bound_ok},\"blowup_flag\":{blowup}}}", self.ledger.acc.g0)
    }
}

/// Image columns follow `x` (the first axis) and rows follow `y`, pointing down.
fn rgba(f: &ScalarField, color: impl Fn(f64) -> [u8; 3]) -> Vec<u8> {
    let n = f.grid().n();
    let v = f.values();
    let mut out = Vec::with_capacity(4 * n * n);
    for row in 0..n {
        for col in 0..n {
            let [r, g, b] = color(v[col * n + row]);
            out.extend_from_slice(&[r, g, b, 255]);
        }
    }
    out
}

/// Initial critical quantity `Q0` of the demo family for each amplitude.
#[wasm_bindgen]
pub fn q0_ladder(n: usize, amplitudes: Vec<f64>, vacuum: bool) -> Result<Vec<f64>, String> {
    amplitudes
        .iter()
        .map(|&a| {
            generate_initial(&initial_data(n, a, vacuum)).map(|s| critical_quantity(&s)).map_err(|e| e.to_string())
        })
        .collect()
}
