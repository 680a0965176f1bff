//! Per-trajectory record of every functional, with trapezoid time integrals.

use serde::{Deserialize, Serialize};

use crate::field::norms::{d2_seminorm_sq, h1_seminorm_sq, scalar_h1_seminorm, sobolev_h2_norm};
use crate::field::curl;
use crate::solver::{PhysicalParams, State};

use super::functionals::{energy_balance, kinetic_energy, lemma22_terms, magnetic_energy};
use super::DiagnosticsError;

/// One time sample. `blowup_int`, `e_func`, `phi_small` and
/// `energy_residual` are running quantities owned by the ledger; the rest
/// are functions of the state alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub kinetic: f64,
    pub magnetic: f64,
    pub grad_u: f64,
    pub grad_h: f64,
    pub curl_h: f64,
    pub q_crit: f64,
    pub e_func: f64,
    pub phi_small: f64,
    pub blowup_int: f64,
    pub energy_residual: f64,
    pub div_u_res: f64,
    pub div_h_res: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub grad_rho: f64,
    pub h2_u: f64,
    pub h2_h: f64,
    pub lemma22_terms: [f64; 4],
    /// `||grad^2 u||^2`, integrand of the dissipation integral.
    pub d2_u: f64,
    pub d2_h: f64,
}

impl DiagnosticsRecord {
    /// State-only entries; running entries are left at zero.
    pub fn instantaneous(state: &State) -> Self {
        let kinetic = kinetic_energy(state);
        let magnetic = magnetic_energy(state);
        let grad_u = h1_seminorm_sq(&state.u);
        let grad_h = h1_seminorm_sq(&state.h);
        DiagnosticsRecord {
            t: state.t,
            kinetic,
            magnetic,
            grad_u,
            grad_h,
            curl_h: curl(&state.h).norm_sq(),
            q_crit: (kinetic + magnetic) * (grad_u + grad_h),
            e_func: 0.0,
            phi_small: 0.0,
            blowup_int: 0.0,
            energy_residual: 0.0,
            div_u_res: state.div_u_relative(),
            div_h_res: state.div_h_relative(),
            rho_min: state.rho.min(),
            rho_max: state.rho.max(),
            grad_rho: scalar_h1_seminorm(&state.rho),
            h2_u: sobolev_h2_norm(&state.u),
            h2_h: sobolev_h2_norm(&state.h),
            lemma22_terms: lemma22_terms(state),
            d2_u: d2_seminorm_sq(&state.u),
            d2_h: d2_seminorm_sq(&state.h),
        }
    }

    pub fn gradient_energy(&self) -> f64 {
        self.grad_u + self.grad_h
    }

    /// Column names in export order.
    pub const COLUMNS: [&'static str; 24] = [
        "t",
        "kinetic",
        "magnetic",
        "grad_u",
        "grad_h",
        "curl_h",
        "q_crit",
        "e_func",
        "phi_small",
        "blowup_int",
        "energy_residual",
        "div_u_res",
        "div_h_res",
        "rho_min",
        "rho_max",
        "grad_rho",
        "h2_u",
        "h2_h",
        "lemma22_1",
        "lemma22_2",
        "lemma22_3",
        "lemma22_4",
        "d2_u",
        "d2_h",
    ];

    pub fn values(&self) -> [f64; 24] {
        let l = self.lemma22_terms;
        [
            self.t,
            self.kinetic,
            self.magnetic,
            self.grad_u,
            self.grad_h,
            self.curl_h,
            self.q_crit,
            self.e_func,
            self.phi_small,
            self.blowup_int,
            self.energy_residual,
            self.div_u_res,
            self.div_h_res,
            self.rho_min,
            self.rho_max,
            self.grad_rho,
            self.h2_u,
            self.h2_h,
            l[0],
            l[1],
            l[2],
            l[3],
            self.d2_u,
            self.d2_h,
        ]
    }
}

/// Running state of a ledger; enough to continue a trajectory exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerAccumulator {
    /// `||sqrt(rho0) u0||^2 + ||H0||^2`.
    pub c0_sq: f64,
    /// Initial gradient energy.
    pub g0: f64,
    pub sup_g: f64,
    pub blowup_int: f64,
    pub d2_int: f64,
    pub energy_residual: f64,
    pub last_t: f64,
    pub last_g: f64,
    pub last_d2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLedger {
    pub records: Vec<DiagnosticsRecord>,
    pub acc: LedgerAccumulator,
}

fn trapezoid(dt: f64, a: f64, b: f64) -> f64 {
    0.5 * dt * (a + b)
}

impl TrajectoryLedger {
    /// Ledger opened at `initial`, whose record is the first sample.
    pub fn new(initial: &State) -> Self {
        let rec = DiagnosticsRecord::instantaneous(initial);
        let g0 = rec.gradient_energy();
        let acc = LedgerAccumulator {
            c0_sq: rec.kinetic + rec.magnetic,
            g0,
            sup_g: g0,
            blowup_int: 0.0,
            d2_int: 0.0,
            energy_residual: 0.0,
            last_t: initial.t,
            last_g: g0,
            last_d2: rec.d2_u + rec.d2_h,
        };
        let mut ledger = TrajectoryLedger { records: Vec::new(), acc };
        let rec = ledger.finish(rec);
        ledger.records.push(rec);
        ledger
    }

    /// Continue from a saved accumulator with no stored records.
    pub fn resume(acc: LedgerAccumulator) -> Self {
        TrajectoryLedger { records: Vec::new(), acc }
    }

    fn finish(&self, mut rec: DiagnosticsRecord) -> DiagnosticsRecord {
        rec.e_func = self.acc.sup_g + self.acc.d2_int;
        rec.phi_small = self.acc.c0_sq * self.acc.sup_g;
        rec.blowup_int = self.acc.blowup_int;
        rec.energy_residual = self.acc.energy_residual;
        rec
    }

    /// Account for the step `prev -> next`. The energy residual accumulates
    /// on every call; a record (and the trapezoid panels since the previous
    /// record) is added only when `sample` is set.
    pub fn observe(
        &mut self,
        prev: &State,
        next: &State,
        dt: f64,
        params: &PhysicalParams,
        sample: bool,
    ) -> Result<Option<&DiagnosticsRecord>, DiagnosticsError> {
        if !(next.t > self.acc.last_t) {
            return Err(DiagnosticsError::InvalidInput(format!(
                "time {} does not advance past {}",
                next.t, self.acc.last_t
            )));
        }
        self.acc.energy_residual += energy_balance(prev, next, dt, params);
        if !sample {
            return Ok(None);
        }
        let rec = DiagnosticsRecord::instantaneous(next);
        let g = rec.gradient_energy();
        let d2 = rec.d2_u + rec.d2_h;
        let h = next.t - self.acc.last_t;
        self.acc.blowup_int += trapezoid(h, self.acc.last_g.powi(4), g.powi(4));
        self.acc.d2_int += trapezoid(h, self.acc.last_d2, d2);
        self.acc.sup_g = self.acc.sup_g.max(g);
        self.acc.last_t = next.t;
        self.acc.last_g = g;
        self.acc.last_d2 = d2;
        let rec = self.finish(rec);
        self.records.push(rec);
        Ok(self.records.last())
    }

    pub fn last(&self) -> Option<&DiagnosticsRecord> {
        self.records.last()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }
}

/// Trapezoid sums over stored samples: `(blowup_int, d2_int)` at each record.
/// Used to confirm that the running integrals are recomputable.
pub fn recompute_integrals(records: &[DiagnosticsRecord]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(records.len());
    let (mut b, mut d) = (0.0, 0.0);
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            let p = &records[i - 1];
            let h = r.t - p.t;
            b += trapezoid(h, p.gradient_energy().powi(4), r.gradient_energy().powi(4));
            d += trapezoid(h, p.d2_u + p.d2_h, r.d2_u + r.d2_h);
        }
        out.push((b, d));
    }
    out
}

/// `(int (||grad u||^2 + ||grad H||^2)^4 dt, flagged)`; the flag is set
/// once the integrand exceeds `factor` times its initial value.
pub fn blowup_criterion_with(ledger: &TrajectoryLedger, factor: f64) -> Result<(f64, bool), DiagnosticsError> {
    let first = ledger.records.first().ok_or(DiagnosticsError::EmptyLedger)?;
    let base = first.gradient_energy().powi(4);
    let flagged = ledger.records.iter().any(|r| r.gradient_energy().powi(4) > factor * base);
    Ok((ledger.acc.blowup_int, flagged))
}

pub fn blowup_criterion(ledger: &TrajectoryLedger) -> Result<(f64, bool), DiagnosticsError> {
    blowup_criterion_with(ledger, 1e6)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma23 {
    pub e: Vec<f64>,
    pub phi: Vec<f64>,
    pub bound_ok: bool,
}

/// `E(t) = sup_{s<=t} G(s) + int_0^t (||grad^2 u||^2 + ||grad^2 H||^2)` and
/// `Phi(t) = C0^2 sup_{s<=t} G(s)` over the stored samples, with `bound_ok`
/// when `E <= 4 G(0)` everywhere. `G` is the gradient energy.
pub fn lemma23_functionals(ledger: &TrajectoryLedger) -> Result<Lemma23, DiagnosticsError> {
    if ledger.records.is_empty() {
        return Err(DiagnosticsError::EmptyLedger);
    }
    let e: Vec<f64> = ledger.records.iter().map(|r| r.e_func).collect();
    let phi = ledger.records.iter().map(|r| r.phi_small).collect();
    let bound = 4.0 * ledger.acc.g0;
    let bound_ok = e.iter().all(|&v| v <= bound);
    Ok(Lemma23 { e, phi, bound_ok })
}
