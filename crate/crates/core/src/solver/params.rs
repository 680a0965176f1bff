use serde::{Deserialize, Serialize};

use super::SolverError;

/// Physical coefficients of the system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Kinematic viscosity.
    pub mu: f64,
    /// Magnetic diffusivity.
    pub lambda: f64,
    /// Upper density bound.
    pub rho_bar: f64,
    /// Density floor used only inside the pressure operator.
    #[serde(default)]
    pub rho_floor: Option<f64>,
}

impl PhysicalParams {
    pub fn new(mu: f64, lambda: f64, rho_bar: f64) -> Self {
        PhysicalParams { mu, lambda, rho_bar, rho_floor: None }
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.rho_floor = Some(floor);
        self
    }

    /// `1e-3 * rho_bar` unless set explicitly.
    pub fn floor(&self) -> f64 {
        self.rho_floor.unwrap_or(1e-3 * self.rho_bar)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |what: &str| Err(SolverError::InvalidParams(what.to_string()));
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad("mu must be positive");
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be positive");
        }
        if !(self.rho_bar > 0.0 && self.rho_bar.is_finite()) {
            return bad("rho_bar must be positive");
        }
        let floor = self.floor();
        if !(floor >= 0.0 && floor < self.rho_bar) {
            return bad("rho_floor must satisfy 0 <= rho_floor < rho_bar");
        }
        Ok(())
    }
}

/// Numerical knobs of the time integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    pub pressure_tol: f64,
    pub pressure_max_iters: usize,
    pub viscous_tol: f64,
    pub viscous_max_iters: usize,
    /// Hard cap on the advective CFL number of a density sub-step.
    pub cfl_cap: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            pressure_tol: 1e-10,
            pressure_max_iters: 500,
            viscous_tol: 1e-12,
            viscous_max_iters: 500,
            cfl_cap: 5.0,
        }
    }
}

/// How the step size is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DtPolicy {
    Fixed { dt: f64 },
    Cfl { safety: f64, dt_max: f64 },
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Cfl { safety: 0.5, dt_max: 0.05 }
    }
}

impl DtPolicy {
    pub fn validate(&self) -> Result<(), SolverError> {
        let ok = match *self {
            DtPolicy::Fixed { dt } => dt > 0.0 && dt.is_finite(),
            DtPolicy::Cfl { safety, dt_max } => safety > 0.0 && dt_max > 0.0 && dt_max.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(SolverError::InvalidParams("dt policy needs positive values".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PhysicalParams::new(0.1, 0.1, 1.0).validate().is_ok());
        assert!(PhysicalParams::new(-0.1, 0.1, 1.0).validate().is_err());
        assert!(PhysicalParams::new(0.1, 0.0, 1.0).validate().is_err());
        assert!(PhysicalParams::new(0.1, 0.1, 1.0).with_floor(1.0).validate().is_err());
        assert_eq!(PhysicalParams::new(0.1, 0.1, 2.0).floor(), 2e-3);
        assert!(DtPolicy::Fixed { dt: 0.0 }.validate().is_err());
    }
}
