use std::fmt;
use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex64;

use super::Grid;

/// Real-valued periodic grid function held in a dual representation.
///
/// At least one of the real samples or the spectral coefficients is always
/// present; the other is computed on first access and cached. Fields are
/// immutable values, so a cached representation never goes stale.
#[derive(Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    real: OnceLock<Vec<f64>>,
    spectral: OnceLock<Vec<Complex64>>,
}

impl ScalarField {
    pub fn from_real(grid: &Arc<Grid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "sample count does not match grid");
        ScalarField {
            grid: grid.clone(),
            real: OnceLock::from(values),
            spectral: OnceLock::new(),
        }
    }

    /// Coefficients must be Hermitian-symmetric; the imaginary part of the
    /// inverse transform is discarded.
    pub fn from_spectral(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len(), "coefficient count does not match grid");
        ScalarField {
            grid: grid.clone(),
            real: OnceLock::new(),
            spectral: OnceLock::from(coeffs),
        }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        ScalarField {
            grid: grid.clone(),
            real: OnceLock::from(vec![0.0; grid.len()]),
            spectral: OnceLock::from(vec![Complex64::new(0.0, 0.0); grid.len()]),
        }
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        Self::from_real(grid, vec![value; grid.len()])
    }

    /// Sample `f` at every grid point. `f` receives `[x, y, z]` (z = 0 in 2D).
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self::from_real(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn has_real(&self) -> bool {
        self.real.get().is_some()
    }

    pub fn has_spectral(&self) -> bool {
        self.spectral.get().is_some()
    }

    /// Real-space samples, transforming from spectral space if needed.
    pub fn values(&self) -> &[f64] {
        self.real.get_or_init(|| {
            let mut buf = self.spectral.get().expect("field has no representation").clone();
            self.grid.inverse(&mut buf);
            buf.into_iter().map(|c| c.re).collect()
        })
    }

    /// Spectral coefficients (unnormalized forward transform).
    pub fn coefficients(&self) -> &[Complex64] {
        self.spectral.get_or_init(|| {
            let mut buf: Vec<Complex64> = self
                .real
                .get()
                .expect("field has no representation")
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            self.grid.forward(&mut buf);
            buf
        })
    }

    /// Force the spectral representation to be present.
    pub fn to_spectral(self) -> Self {
        self.coefficients();
        self
    }

    /// Force the real representation to be present.
    pub fn to_real(self) -> Self {
        self.values();
        self
    }

    /// Drop the spectral cache and keep only real samples. Steps end with
    /// this so that a state rebuilt from saved samples evolves identically.
    pub fn canonical(&self) -> Self {
        Self::from_real(&self.grid, self.values().to_vec())
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid)
    }

    /// Apply a per-mode multiplier in spectral space.
    pub fn map_spectral(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let coeffs = self.coefficients().iter().enumerate().map(|(i, &c)| f(i, c)).collect();
        Self::from_spectral(&self.grid, coeffs)
    }

    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_real(&self.grid, self.values().iter().map(|&v| f(v)).collect())
    }

    /// `a*self + b*other`, combined in whichever representation both hold.
    pub fn lincomb(&self, a: f64, other: &ScalarField, b: f64) -> Self {
        debug_assert!(self.same_grid(other));
        if let (Some(x), Some(y)) = (self.spectral.get(), other.spectral.get()) {
            if self.real.get().is_none() || other.real.get().is_none() {
                let c = x.iter().zip(y).map(|(p, q)| p * a + q * b).collect();
                return Self::from_spectral(&self.grid, c);
            }
        }
        let v = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(p, q)| a * p + b * q)
            .collect();
        Self::from_real(&self.grid, v)
    }

    pub fn scale(&self, a: f64) -> Self {
        match (self.real.get(), self.spectral.get()) {
            (None, Some(c)) => Self::from_spectral(&self.grid, c.iter().map(|z| z * a).collect()),
            _ => self.map_real(|v| a * v),
        }
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        self.lincomb(1.0, other, -1.0)
    }

    /// Pointwise product without any spectral truncation.
    pub fn mul_pointwise(&self, other: &ScalarField) -> Self {
        debug_assert!(self.same_grid(other));
        let v = self.values().iter().zip(other.values()).map(|(p, q)| p * q).collect();
        Self::from_real(&self.grid, v)
    }

    pub fn min(&self) -> f64 {
        self.values().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Spatial mean, read off the zero mode.
    pub fn mean(&self) -> f64 {
        self.coefficients()[0].re / self.grid.len() as f64
    }

    pub fn is_zero(&self) -> bool {
        match self.real.get() {
            Some(v) => v.iter().all(|&x| x == 0.0),
            None => self.coefficients().iter().all(|c| c.re == 0.0 && c.im == 0.0),
        }
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("real", &self.has_real())
            .field("spectral", &self.has_spectral())
            .finish()
    }
}
