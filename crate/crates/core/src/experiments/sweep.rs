//! Trajectory classification and amplitude sweeps.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{critical_quantity, lemma23_functionals, TrajectoryLedger};
use crate::solver::{DtPolicy, PhysicalParams, SolverError, SolverSettings};

use super::initial::{generate_initial, InitialData};
use super::run::{run_trajectory, RunOptions, RunOutcome};
use super::ExperimentError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Decay,
    Growth,
    Inconclusive,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Decay => "decay",
            Classification::Growth => "growth",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

/// Classification factors relative to the initial gradient energy `G0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Decay needs `G(t_end) <= decay * G0`.
    pub decay: f64,
    /// ... and `G <= bound * G0` throughout.
    pub bound: f64,
    /// Growth once `G > growth * G0`.
    pub growth: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { decay: 0.1, bound: 4.0, growth: 100.0 }
    }
}

/// `decay` if the run reached its horizon with the final gradient energy
/// below `decay * G0` and never above `bound * G0` (a run at rest counts
/// as decay); `growth` if it ever exceeded `growth * G0` or a step was
/// rejected by the CFL cap; `inconclusive` otherwise.
pub fn classify_trajectory(
    ledger: &TrajectoryLedger,
    horizon_reached: bool,
    cfl_rejected: bool,
    thresholds: &Thresholds,
) -> Result<Classification, ExperimentError> {
    let last = ledger.last().ok_or(crate::diagnostics::DiagnosticsError::EmptyLedger)?;
    let g0 = ledger.acc.g0;
    let max_g = ledger.records.iter().map(|r| r.gradient_energy()).fold(g0, f64::max);
    if cfl_rejected || max_g > thresholds.growth * g0 || !max_g.is_finite() {
        return Ok(Classification::Growth);
    }
    if horizon_reached && last.gradient_energy() <= thresholds.decay * g0 && max_g <= thresholds.bound * g0 {
        return Ok(Classification::Decay);
    }
    Ok(Classification::Inconclusive)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: InitialData,
    pub amplitudes: Vec<f64>,
    pub params: PhysicalParams,
    pub horizon: f64,
    #[serde(default)]
    pub policy: DtPolicy,
    #[serde(default)]
    pub settings: SolverSettings,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Worker threads; 0 picks the pool default.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "one")]
    pub stride: usize,
}

fn one() -> usize {
    1
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.amplitudes.is_empty() {
            return Err(ExperimentError::InvalidSpec("amplitude list is empty".into()));
        }
        if self.amplitudes.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(ExperimentError::InvalidSpec("amplitudes must be finite and >= 0".into()));
        }
        if self.amplitudes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ExperimentError::InvalidSpec("amplitudes must be strictly increasing".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) || self.stride == 0 {
            return Err(ExperimentError::InvalidSpec("horizon must be > 0 and stride >= 1".into()));
        }
        self.params.validate()?;
        self.policy.validate()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub amplitude: f64,
    pub q0: f64,
    pub classification: Classification,
    /// Time reached.
    pub t_end: f64,
    pub steps: usize,
    pub g0: f64,
    /// Largest sampled `||grad u||^2 + ||grad H||^2`.
    pub max_grad_energy: f64,
    pub bound_ok: bool,
    /// `int_0^T (||grad u||^2 + ||grad H||^2)^4 dt`.
    pub blowup_int: f64,
    /// `4^4 G0^4 T`.
    pub blowup_bound: f64,
    pub max_div: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn blowup_ok(&self) -> bool {
        self.blowup_int <= self.blowup_bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub thresholds: Thresholds,
    pub rows: Vec<SweepRow>,
    /// Largest Q0 classified as decay.
    pub largest_decay_q0: Option<f64>,
    /// Smallest Q0 above it classified otherwise.
    pub smallest_other_q0: Option<f64>,
}

impl SweepResult {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }

    pub const CSV_HEADER: &'static str = "amplitude,q0,classification,t_end,steps,g0,max_grad_energy,bound_ok,blowup_int,blowup_bound,max_div,rho_min,rho_max,error";

    pub fn to_csv(&self) -> String {
        use crate::diagnostics::export::format_number as f;
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                f(r.amplitude),
                f(r.q0),
                r.classification.as_str(),
                f(r.t_end),
                r.steps,
                f(r.g0),
                f(r.max_grad_energy),
                r.bound_ok,
                f(r.blowup_int),
                f(r.blowup_bound),
                f(r.max_div),
                f(r.rho_min),
                f(r.rho_max),
                err
            ));
        }
        out
    }

    /// JSON summary: thresholds, band and per-row status.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "thresholds": self.thresholds,
            "threshold_band": [self.largest_decay_q0, self.smallest_other_q0],
            "rows": self.rows.iter().map(|r| serde_json::json!({
                "amplitude": r.amplitude,
                "q0": r.q0,
                "classification": r.classification,
                "bound_ok": r.bound_ok,
                "error": r.error,
            })).collect::<Vec<_>>(),
        })
    }
}

fn row_from_outcome(amplitude: f64, q0: f64, out: &RunOutcome, cfg: &SweepConfig) -> Result<SweepRow, ExperimentError> {
    let cfl_rejected = matches!(out.error, Some(SolverError::Cfl { .. }));
    let reached = out.horizon_reached(cfg.horizon);
    let classification = classify_trajectory(&out.ledger, reached, cfl_rejected, &cfg.thresholds)?;
    let lemma = lemma23_functionals(&out.ledger)?;
    let g0 = out.ledger.acc.g0;
    let max_g = out.ledger.records.iter().map(|r| r.gradient_energy()).fold(0.0, f64::max);
    let (rho_min, rho_max) = out
        .ledger
        .records
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.rho_min), hi.max(r.rho_max)));
    Ok(SweepRow {
        amplitude,
        q0,
        classification,
        t_end: out.state.t,
        steps: out.steps,
        g0,
        max_grad_energy: max_g,
        bound_ok: lemma.bound_ok,
        blowup_int: out.ledger.acc.blowup_int,
        blowup_bound: 256.0 * g0.powi(4) * out.state.t,
        max_div: out.max_div_u.max(out.max_div_h),
        rho_min,
        rho_max,
        // a CFL rejection is a classification outcome, anything else is an error
        error: out.error.as_ref().filter(|_| !cfl_rejected).map(|e| e.to_string()),
    })
}

fn error_row(amplitude: f64, e: ExperimentError) -> SweepRow {
    SweepRow {
        amplitude,
        q0: f64::NAN,
        classification: Classification::Inconclusive,
        t_end: 0.0,
        steps: 0,
        g0: f64::NAN,
        max_grad_energy: f64::NAN,
        bound_ok: false,
        blowup_int: f64::NAN,
        blowup_bound: f64::NAN,
        max_div: f64::NAN,
        rho_min: f64::NAN,
        rho_max: f64::NAN,
        error: Some(e.to_string()),
    }
}

/// One sweep row: generate, run to the horizon, classify.
pub fn run_row(cfg: &SweepConfig, amplitude: f64) -> SweepRow {
    let attempt = || -> Result<SweepRow, ExperimentError> {
        let initial = generate_initial(&cfg.base.scaled(amplitude))?;
        let q0 = critical_quantity(&initial);
        let opts = RunOptions { policy: cfg.policy, settings: cfg.settings, horizon: cfg.horizon, stride: cfg.stride };
        let out = run_trajectory(initial, &cfg.params, &opts)?;
        row_from_outcome(amplitude, q0, &out, cfg)
    };
    attempt().unwrap_or_else(|e| error_row(amplitude, e))
}

#[cfg(feature = "parallel")]
fn run_rows(cfg: &SweepConfig) -> Vec<SweepRow> {
    use rayon::prelude::*;
    let work = || cfg.amplitudes.par_iter().map(|&a| run_row(cfg, a)).collect::<Vec<_>>();
    if cfg.workers == 0 {
        return work();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(pool) => pool.install(work),
        Err(_) => cfg.amplitudes.iter().map(|&a| run_row(cfg, a)).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_rows(cfg: &SweepConfig) -> Vec<SweepRow> {
    cfg.amplitudes.iter().map(|&a| run_row(cfg, a)).collect()
}

/// Threshold band from rows sorted by amplitude.
pub fn threshold_band(rows: &[SweepRow]) -> (Option<f64>, Option<f64>) {
    let largest = rows
        .iter()
        .filter(|r| r.classification == Classification::Decay && r.error.is_none())
        .map(|r| r.q0)
        .fold(None, |m: Option<f64>, q| Some(m.map_or(q, |m| m.max(q))));
    let smallest = rows
        .iter()
        .filter(|r| r.classification != Classification::Decay && r.error.is_none())
        .filter(|r| largest.is_none_or(|l| r.q0 > l))
        .map(|r| r.q0)
        .fold(None, |m: Option<f64>, q| Some(m.map_or(q, |m| m.min(q))));
    (largest, smallest)
}

/// Run every amplitude (rows in parallel when enabled); per-row failures are
/// recorded in the row.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, ExperimentError> {
    cfg.validate()?;
    let mut rows = run_rows(cfg);
    rows.sort_by(|a, b| a.amplitude.total_cmp(&b.amplitude));
    let (largest_decay_q0, smallest_other_q0) = threshold_band(&rows);
    Ok(SweepResult { thresholds: cfg.thresholds, rows, largest_decay_q0, smallest_other_q0 })
}
