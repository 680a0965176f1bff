//! Driving one trajectory to a horizon while filling its ledger.

use crate::diagnostics::TrajectoryLedger;
use crate::solver::{choose_dt, step_dt, DtPolicy, PhysicalParams, SolverError, SolverSettings, State};

use super::ExperimentError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub policy: DtPolicy,
    pub settings: SolverSettings,
    pub horizon: f64,
    /// Ledger sample every `stride` steps; the final step is always sampled.
    pub stride: usize,
}

impl RunOptions {
    pub fn new(horizon: f64) -> Self {
        RunOptions { policy: DtPolicy::default(), settings: SolverSettings::default(), horizon, stride: 1 }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub ledger: TrajectoryLedger,
    /// Last accepted state.
    pub state: State,
    pub steps: usize,
    /// The rejection that ended the run early, if any.
    pub error: Option<SolverError>,
    pub max_div_u: f64,
    pub max_div_h: f64,
    pub max_pressure_iters: usize,
}

impl RunOutcome {
    pub fn horizon_reached(&self, horizon: f64) -> bool {
        self.error.is_none() && self.state.t >= horizon * (1.0 - 1e-12)
    }
}

/// Step size for the next step, stretched or trimmed so the run lands on
/// the horizon exactly.
pub fn next_dt(state: &State, policy: &DtPolicy, horizon: f64) -> f64 {
    let dt = choose_dt(state, policy);
    let remaining = horizon - state.t;
    if dt >= remaining * (1.0 - 1e-9) {
        remaining
    } else {
        dt
    }
}

/// Advance from `initial` (whose ledger is opened here) to `opts.horizon`.
pub fn run_trajectory(
    initial: State,
    params: &PhysicalParams,
    opts: &RunOptions,
) -> Result<RunOutcome, ExperimentError> {
    let ledger = TrajectoryLedger::new(&initial);
    continue_trajectory(initial, ledger, 0, params, opts, |_, _, _| Ok(()))
}

/// Continue a run; `hook(step_index, state, ledger)` is called after every
/// accepted step (checkpointing lives there).
pub fn continue_trajectory<F>(
    mut state: State,
    mut ledger: TrajectoryLedger,
    mut steps: usize,
    params: &PhysicalParams,
    opts: &RunOptions,
    mut hook: F,
) -> Result<RunOutcome, ExperimentError>
where
    F: FnMut(usize, &State, &TrajectoryLedger) -> Result<(), ExperimentError>,
{
    params.validate()?;
    opts.policy.validate()?;
    if !(opts.horizon.is_finite() && opts.horizon >= 0.0) || opts.stride == 0 {
        return Err(ExperimentError::InvalidSpec("horizon must be >= 0 and stride >= 1".into()));
    }
    let mut max_div_u = state.div_u_relative();
    let mut max_div_h = state.div_h_relative();
    let mut max_pressure_iters = 0;
    let mut error = None;
    while state.t < opts.horizon * (1.0 - 1e-12) {
        let dt = next_dt(&state, &opts.policy, opts.horizon);
        let (next, report) = match step_dt(&state, params, dt, &opts.settings) {
            Ok(r) => r,
            Err(e) => {
                error = Some(e);
                break;
            }
        };
        steps += 1;
        let last = next.t >= opts.horizon * (1.0 - 1e-12);
        let sample = steps % opts.stride == 0 || last;
        ledger.observe(&state, &next, dt, params, sample)?;
        max_div_u = max_div_u.max(next.div_u_relative());
        max_div_h = max_div_h.max(next.div_h_relative());
        max_pressure_iters = max_pressure_iters.max(report.pressure_iters);
        state = next;
        hook(steps, &state, &ledger)?;
    }
    Ok(RunOutcome { ledger, state, steps, error, max_div_u, max_div_h, max_pressure_iters })
}
