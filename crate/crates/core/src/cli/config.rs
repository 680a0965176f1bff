//! TOML configuration files for `run` and `sweep`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{DensityProfile, Family, GridSpec, InitialData, SweepConfig, Thresholds};
use crate::solver::{DtPolicy, PhysicalParams, SolverSettings};

use super::CliError;

/// Initial data without the grid, which lives in its own table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub family: Family,
    #[serde(default)]
    pub amplitude_u: f64,
    #[serde(default)]
    pub amplitude_h: f64,
    pub density: DensityProfile,
}

impl InitialSpec {
    /// Combine with the grid; `seed` replaces the seed of a random family.
    pub fn build(&self, grid: GridSpec, seed: Option<u64>) -> InitialData {
        let mut family = self.family;
        if let (Family::RandomSolenoidal { seed: s, .. }, Some(new)) = (&mut family, seed) {
            *s = new;
        }
        InitialData { family, amplitude_u: self.amplitude_u, amplitude_h: self.amplitude_h, density: self.density, grid }
    }
}

fn one() -> usize {
    1
}

fn default_checkpoint_stride() -> usize {
    100
}

/// A single trajectory: `mhdcrit run --config run.toml`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub params: PhysicalParams,
    pub initial: InitialSpec,
    #[serde(default)]
    pub dt: DtPolicy,
    #[serde(default)]
    pub settings: SolverSettings,
    pub horizon: f64,
    /// Ledger sample every `stride` steps.
    #[serde(default = "one")]
    pub stride: usize,
    /// Checkpoint every `checkpoint_stride` steps; 0 keeps only the first
    /// and last.
    #[serde(default = "default_checkpoint_stride")]
    pub checkpoint_stride: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn initial_data(&self) -> InitialData {
        self.initial.build(self.grid, self.seed)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        self.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.dt.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be finite and >= 0, got {}", self.horizon));
        }
        if self.stride == 0 {
            return bad("stride must be >= 1".into());
        }
        validate_initial(&self.initial, &self.params)?;
        self.grid.build().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }
}

fn validate_initial(init: &InitialSpec, params: &PhysicalParams) -> Result<(), CliError> {
    let bad = |m: String| Err(CliError::Config(m));
    if !(init.amplitude_u.is_finite() && init.amplitude_h.is_finite()) {
        return bad("amplitudes must be finite".into());
    }
    let top = init.density.upper_bound();
    if !(top > 0.0 && top <= params.rho_bar) {
        return bad(format!("density upper bound {top} must lie in (0, rho_bar = {}]", params.rho_bar));
    }
    match init.density {
        DensityProfile::SmoothBump { min, max } if !(min >= 0.0 && min <= max) => {
            bad(format!("smooth_bump needs 0 <= min <= max, got [{min}, {max}]"))
        }
        DensityProfile::VacuumDisk { radius, band, .. } if !(radius > 0.0 && band.is_none_or(|b| b > 0.0)) => {
            bad("vacuum_disk needs radius > 0 and band > 0".into())
        }
        _ => Ok(()),
    }
}

/// An amplitude sweep: `mhdcrit sweep --config sweep.toml`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFileConfig {
    pub grid: GridSpec,
    pub params: PhysicalParams,
    pub initial: InitialSpec,
    pub amplitudes: Vec<f64>,
    /// Default: 20 diffusive times `20 / (mu (2 pi / L)^2)`.
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub dt: DtPolicy,
    #[serde(default)]
    pub settings: SolverSettings,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl SweepFileConfig {
    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or_else(|| {
            let k = 2.0 * std::f64::consts::PI / self.grid.box_length;
            20.0 / (self.params.mu * k * k)
        })
    }

    pub fn to_sweep(&self) -> SweepConfig {
        SweepConfig {
            base: self.initial.build(self.grid, self.seed),
            amplitudes: self.amplitudes.clone(),
            params: self.params,
            horizon: self.horizon(),
            policy: self.dt,
            settings: self.settings,
            thresholds: self.thresholds,
            workers: self.workers,
            stride: self.stride,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        validate_initial(&self.initial, &self.params)?;
        self.grid.build().map_err(|e| CliError::Config(e.to_string()))?;
        self.to_sweep().validate().map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn load_run_config(path: &Path) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = read_toml(path)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_sweep_config(path: &Path) -> Result<SweepFileConfig, CliError> {
    let cfg: SweepFileConfig = read_toml(path)?;
    cfg.validate()?;
    Ok(cfg)
}
