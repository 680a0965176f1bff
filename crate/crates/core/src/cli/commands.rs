use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::export::{csv_header, read_ndjson, record_to_csv, record_to_json};
use crate::diagnostics::{recompute_integrals, DiagnosticsRecord, TrajectoryLedger};
use crate::experiments::{
    continue_trajectory, generate_initial, run_sweep, run_verification_suite, CheckStatus, ExperimentError,
    RunOptions, VerificationConfig,
};
use crate::solver::SCHEME_VERSION;

use super::checkpoint::{list_checkpoints, read_checkpoint, write_checkpoint};
use super::config::{read_toml, RunConfig, SweepFileConfig};
use super::CliError;

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub steps: usize,
    pub t: f64,
    pub final_record_json: String,
    pub last_checkpoint: PathBuf,
    /// Solver rejection that stopped the run early.
    pub error: Option<String>,
}

impl RunSummary {
    pub fn into_result(self) -> Result<(), CliError> {
        match self.error {
            Some(e) => Err(CliError::Solver(format!(
                "stopped at t = {} after {} steps ({e}); last good checkpoint {}",
                self.t,
                self.steps,
                self.last_checkpoint.display()
            ))),
            None => Ok(()),
        }
    }
}

fn experiment_error(e: ExperimentError) -> CliError {
    match e {
        ExperimentError::InvalidSpec(m) => CliError::Config(m),
        other => CliError::Solver(other.to_string()),
    }
}

fn header_line(meta: &serde_json::Value) -> String {
    format!("# {}", serde_json::to_string(meta).unwrap_or_default())
}

/// Advance the configured trajectory (or resume it from a checkpoint) into
/// `out`: `ledger.ndjson`, `ledger.csv`, `run.json` and `checkpoints/`.
pub fn cmd_run(cfg: &RunConfig, out: &Path, resume: Option<&Path>) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let ck_dir = out.join("checkpoints");
    let ndjson_path = out.join("ledger.ndjson");
    let params = cfg.params;

    let (state, ledger, steps, prior) = match resume {
        None => {
            let s = generate_initial(&cfg.initial_data()).map_err(|e| CliError::Config(e.to_string()))?;
            let ledger = TrajectoryLedger::new(&s);
            write_checkpoint(&ck_dir, 0, &s, &params, &ledger.acc)?;
            (s, ledger, 0, Vec::new())
        }
        Some(path) => {
            let (s, side) = read_checkpoint(path)?;
            if side.params != params {
                return Err(CliError::Config("checkpoint parameters differ from the config".into()));
            }
            let g = s.grid();
            if g.dim() != cfg.grid.dim || g.n() != cfg.grid.n || g.box_length() != cfg.grid.box_length {
                return Err(CliError::Config("checkpoint grid differs from the config".into()));
            }
            let prior: Vec<DiagnosticsRecord> = if ndjson_path.exists() {
                let f = BufReader::new(File::open(&ndjson_path)?);
                read_ndjson(f).map_err(|e| CliError::Config(e.to_string()))?.into_iter().filter(|r| r.t <= side.t).collect()
            } else {
                Vec::new()
            };
            (s, TrajectoryLedger::resume(side.accumulator), side.step, prior)
        }
    };

    let meta = serde_json::json!({
        "scheme_version": SCHEME_VERSION,
        "config": cfg,
        "resumed_from": resume.map(|p| p.display().to_string()),
        "resumed_at_step": resume.map(|_| steps),
    });
    std::fs::write(out.join("run.json"), serde_json::to_string_pretty(&meta).unwrap_or_default() + "\n")?;

    let mut nd = BufWriter::new(File::create(&ndjson_path)?);
    let mut csv = BufWriter::new(File::create(out.join("ledger.csv"))?);
    writeln!(csv, "{}", header_line(&serde_json::json!({ "scheme_version": SCHEME_VERSION })))?;
    writeln!(csv, "{}", csv_header())?;
    for r in prior.iter().chain(ledger.records.iter()) {
        writeln!(nd, "{}", record_to_json(r))?;
        writeln!(csv, "{}", record_to_csv(r))?;
    }
    nd.flush()?;
    csv.flush()?;

    let opts = RunOptions { policy: cfg.dt, settings: cfg.settings, horizon: cfg.horizon, stride: cfg.stride };
    let mut written = ledger.records.len();
    let mut io_error: Option<CliError> = None;
    let mut last_checkpoint = crate::cli::checkpoint::checkpoint_path(&ck_dir, steps);
    let mut last_checkpoint_step = steps;
    let hook = |step: usize, state: &crate::solver::State, ledger: &TrajectoryLedger| {
        let mut write = || -> Result<(), CliError> {
            for r in &ledger.records[written..] {
                writeln!(nd, "{}", record_to_json(r))?;
                writeln!(csv, "{}", record_to_csv(r))?;
            }
            if ledger.records.len() > written {
                nd.flush()?;
                csv.flush()?;
            }
            written = ledger.records.len();
            if cfg.checkpoint_stride > 0 && step % cfg.checkpoint_stride == 0 {
                last_checkpoint = write_checkpoint(&ck_dir, step, state, &params, &ledger.acc)?;
                last_checkpoint_step = step;
            }
            Ok(())
        };
        write().map_err(|e| {
            let msg = e.to_string();
            io_error = Some(e);
            ExperimentError::InvalidSpec(msg)
        })
    };
    let outcome = continue_trajectory(state, ledger, steps, &params, &opts, hook);
    if let Some(e) = io_error {
        return Err(e);
    }
    let outcome = outcome.map_err(experiment_error)?;
    if outcome.steps != last_checkpoint_step {
        last_checkpoint = write_checkpoint(&ck_dir, outcome.steps, &outcome.state, &params, &outcome.ledger.acc)?;
    }
    let final_record = outcome
        .ledger
        .last()
        .cloned()
        .or_else(|| prior.last().cloned())
        .unwrap_or_else(|| DiagnosticsRecord::instantaneous(&outcome.state));
    Ok(RunSummary {
        steps: outcome.steps,
        t: outcome.state.t,
        final_record_json: record_to_json(&final_record),
        last_checkpoint,
        error: outcome.error.map(|e| e.to_string()),
    })
}

/// Run the verification suite (all checks, or the subset in `config`),
/// printing one line per check.
pub fn cmd_verify(config: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let cfg: VerificationConfig = match config {
        Some(p) => read_toml(p)?,
        None => VerificationConfig::default(),
    };
    let report = run_verification_suite(&cfg).map_err(experiment_error)?;
    for c in &report.checks {
        let status = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inconclusive => "INCONCLUSIVE",
        };
        println!("{status:<12} {:<20} value {:.3e} (tolerance {}) {}", c.name, c.value, c.tolerance, c.detail);
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::json!({ "scheme_version": SCHEME_VERSION, "report": report });
        std::fs::write(dir.join("verification.json"), serde_json::to_string_pretty(&json).unwrap_or_default() + "\n")?;
    }
    if report.ok() {
        Ok(())
    } else {
        Err(CliError::Verification(report.failing().join(", ")))
    }
}

/// Run the sweep into `out`: `sweep.csv` and `sweep_summary.json`.
pub fn cmd_sweep(cfg: &SweepFileConfig, out: &Path) -> Result<(), CliError> {
    cfg.validate()?;
    let sweep = cfg.to_sweep();
    std::fs::create_dir_all(out)?;
    let result = run_sweep(&sweep).map_err(experiment_error)?;
    let meta = serde_json::json!({
        "scheme_version": SCHEME_VERSION,
        "thresholds": sweep.thresholds,
        "horizon": sweep.horizon,
    });
    let mut csv = header_line(&meta);
    csv.push('\n');
    csv.push_str(&result.to_csv());
    std::fs::write(out.join("sweep.csv"), csv)?;
    let mut summary = result.summary_json();
    summary["scheme_version"] = SCHEME_VERSION.into();
    summary["config"] = serde_json::to_value(cfg).unwrap_or_default();
    std::fs::write(out.join("sweep_summary.json"), serde_json::to_string_pretty(&summary).unwrap_or_default() + "\n")?;
    for r in &result.rows {
        println!(
            "a {:.6e}  Q0 {:.6e}  {:<12} t_end {:.4}  bound_ok {}{}",
            r.amplitude,
            r.q0,
            r.classification.as_str(),
            r.t_end,
            r.bound_ok,
            r.error.as_ref().map(|e| format!("  error: {e}")).unwrap_or_default()
        );
    }
    println!("threshold band: {:?} .. {:?}", result.largest_decay_q0, result.smallest_other_q0);
    let errors = result.rows.iter().filter(|r| r.error.is_some()).count();
    if errors > 0 {
        return Err(CliError::RowErrors(errors));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagSummary {
    pub records_checked: usize,
    pub checkpoints: usize,
    pub max_rel_dev: f64,
}

fn rel_dev(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

const DIAG_TOL: f64 = 1e-12;

/// Recompute every stored record of a run directory: state-only entries
/// from the checkpoint at the same time, running integrals from the stored
/// samples and the checkpoint accumulators.
pub fn cmd_diag(dir: &Path) -> Result<DiagSummary, CliError> {
    let path = dir.join("ledger.ndjson");
    let f = File::open(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let records = read_ndjson(BufReader::new(f)).map_err(|e| CliError::Config(e.to_string()))?;
    let first = records.first().ok_or_else(|| CliError::Config("ledger is empty".into()))?;
    let mut worst = 0.0f64;
    let mut mismatches = Vec::new();
    let mut check = |what: String, stored: f64, recomputed: f64| {
        let d = rel_dev(stored, recomputed);
        worst = worst.max(d);
        if d > DIAG_TOL || stored.is_nan() != recomputed.is_nan() {
            mismatches.push(format!("{what}: stored {stored:e}, recomputed {recomputed:e}"));
        }
    };

    let c0_sq = first.kinetic + first.magnetic;
    let mut sup_g = f64::NEG_INFINITY;
    for (r, (b, d2)) in records.iter().zip(recompute_integrals(&records)) {
        sup_g = sup_g.max(r.gradient_energy());
        check(format!("t={} blowup_int", r.t), r.blowup_int, b);
        check(format!("t={} e_func", r.t), r.e_func, sup_g + d2);
        check(format!("t={} phi_small", r.t), r.phi_small, c0_sq * sup_g);
    }

    let checkpoints = list_checkpoints(&dir.join("checkpoints"))?;
    let mut matched = 0;
    for ck in &checkpoints {
        let (state, side) = read_checkpoint(ck)?;
        let Some(stored) = records.iter().find(|r| r.t == state.t) else {
            continue;
        };
        matched += 1;
        let fresh = DiagnosticsRecord::instantaneous(&state);
        let names = DiagnosticsRecord::COLUMNS;
        for (i, (s, f)) in stored.values().iter().zip(fresh.values()).enumerate() {
            if matches!(names[i], "e_func" | "phi_small" | "blowup_int" | "energy_residual") {
                continue;
            }
            check(format!("t={} {} (step {})", state.t, names[i], side.step), *s, f);
        }
        check(format!("t={} blowup_int vs checkpoint", state.t), stored.blowup_int, side.accumulator.blowup_int);
        check(
            format!("t={} energy_residual vs checkpoint", state.t),
            stored.energy_residual,
            side.accumulator.energy_residual,
        );
    }
    if !mismatches.is_empty() {
        return Err(CliError::DiagMismatch(format!("{} entries differ; first: {}", mismatches.len(), mismatches[0])));
    }
    Ok(DiagSummary { records_checked: matched, checkpoints: checkpoints.len(), max_rel_dev: worst })
}
