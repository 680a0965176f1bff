//! Initial-data families.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::norms::vector_l2_norm_sq;
use crate::field::{leray_project, Grid, ScalarField, VectorField};
use crate::solver::State;

use super::ExperimentError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    #[serde(default = "two_pi")]
    pub box_length: f64,
    #[serde(default = "yes")]
    pub dealias: bool,
}

fn two_pi() -> f64 {
    2.0 * PI
}

fn yes() -> bool {
    true
}

impl GridSpec {
    pub fn new(dim: usize, n: usize) -> Self {
        GridSpec { dim, n, box_length: 2.0 * PI, dealias: true }
    }

    pub fn build(&self) -> Result<Arc<Grid>, ExperimentError> {
        let g = if self.dealias {
            Grid::new(self.dim, self.n, self.box_length)?
        } else {
            Grid::without_dealiasing(self.dim, self.n, self.box_length)?
        };
        Ok(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `u = a_u (sin x cos y [cos z], -cos x sin y [cos z], 0)`, `H = 0`.
    TaylorGreen,
    /// `u = 0`, `H = a_h (sin y, 0, 0)`.
    SingleModeMagnetic,
    /// Independent random divergence-free `u` and `H` with mode amplitudes
    /// `|k|^-slope exp(-(|k|/cutoff)^2)` for integer `|k| <= kmax`
    /// (default `ceil(4 cutoff)`), scaled to mean-square speeds `a^2 / 2`.
    RandomSolenoidal {
        seed: u64,
        slope: f64,
        cutoff: f64,
        #[serde(default)]
        kmax: Option<u32>,
    },
    /// Taylor-Green velocity plus the single magnetic mode.
    Combined,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityProfile {
    Constant { rho_bar: f64 },
    /// `min + (max - min) prod_j exp(cos(x_j - c_j) - 1)` about the box centre.
    SmoothBump { min: f64, max: f64 },
    /// Zero on the centred disk (ball in 3D) of the given radius, rising
    /// to `rho_bar` through a quintic smoothstep band of width `band`
    /// (default `radius / 2`).
    VacuumDisk {
        radius: f64,
        rho_bar: f64,
        #[serde(default)]
        band: Option<f64>,
    },
}

impl DensityProfile {
    pub fn upper_bound(&self) -> f64 {
        match *self {
            DensityProfile::Constant { rho_bar } => rho_bar,
            DensityProfile::SmoothBump { max, .. } => max,
            DensityProfile::VacuumDisk { rho_bar, .. } => rho_bar,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub family: Family,
    pub amplitude_u: f64,
    pub amplitude_h: f64,
    pub density: DensityProfile,
    pub grid: GridSpec,
}

impl InitialData {
    /// Both base amplitudes multiplied by `a`.
    pub fn scaled(&self, a: f64) -> Self {
        InitialData { amplitude_u: self.amplitude_u * a, amplitude_h: self.amplitude_h * a, ..*self }
    }
}

fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    (s * s * s * (s * (6.0 * s - 15.0) + 10.0)).clamp(0.0, 1.0)
}

fn density(grid: &Arc<Grid>, profile: &DensityProfile) -> Result<ScalarField, ExperimentError> {
    let l = grid.box_length();
    let c = 0.5 * l;
    let dim = grid.dim();
    match *profile {
        DensityProfile::Constant { rho_bar } => {
            if !(rho_bar > 0.0) {
                return Err(ExperimentError::InvalidSpec("constant density must be positive".into()));
            }
            Ok(ScalarField::constant(grid, rho_bar))
        }
        DensityProfile::SmoothBump { min, max } => {
            if !(0.0 <= min && min <= max && max > 0.0) {
                return Err(ExperimentError::InvalidSpec("smooth bump needs 0 <= min <= max, max > 0".into()));
            }
            let scale = 2.0 * PI / l;
            Ok(ScalarField::from_fn(grid, |x| {
                let mut p = 1.0;
                for xj in x.iter().take(dim) {
                    p *= ((scale * (xj - c)).cos() - 1.0).exp();
                }
                min + (max - min) * p
            }))
        }
        DensityProfile::VacuumDisk { radius, rho_bar, band } => {
            let band = band.unwrap_or(0.5 * radius);
            if !(radius > 0.0 && band > 0.0 && rho_bar > 0.0 && radius + band < c) {
                return Err(ExperimentError::InvalidSpec(
                    "vacuum disk needs radius, band, rho_bar > 0 and radius + band < L/2".into(),
                ));
            }
            Ok(ScalarField::from_fn(grid, |x| {
                let r = x.iter().take(dim).map(|xj| (xj - c).powi(2)).sum::<f64>().sqrt();
                rho_bar * smoothstep((r - radius) / band)
            }))
        }
    }
}

fn taylor_green(grid: &Arc<Grid>, a: f64) -> VectorField {
    let s = 2.0 * PI / grid.box_length();
    if grid.dim() == 2 {
        VectorField::from_fn(grid, |x| {
            let (x0, x1) = (s * x[0], s * x[1]);
            [a * x0.sin() * x1.cos(), -a * x0.cos() * x1.sin(), 0.0]
        })
    } else {
        VectorField::from_fn(grid, |x| {
            let (x0, x1, x2) = (s * x[0], s * x[1], s * x[2]);
            [a * x0.sin() * x1.cos() * x2.cos(), -a * x0.cos() * x1.sin() * x2.cos(), 0.0]
        })
    }
}

fn magnetic_mode(grid: &Arc<Grid>, a: f64) -> VectorField {
    let s = 2.0 * PI / grid.box_length();
    VectorField::from_fn(grid, |x| [a * (s * x[1]).sin(), 0.0, 0.0])
}

/// Random field with the given spectrum, generated on the integer lattice
/// independently of the grid size so that refinements sample the same
/// function.
pub fn random_solenoidal(
    grid: &Arc<Grid>,
    seed: u64,
    slope: f64,
    cutoff: f64,
    kmax: Option<u32>,
    amplitude: f64,
) -> Result<VectorField, ExperimentError> {
    if !(cutoff > 0.0 && slope.is_finite()) {
        return Err(ExperimentError::InvalidSpec("random field needs cutoff > 0".into()));
    }
    let kmax = kmax.map(i64::from).unwrap_or((4.0 * cutoff).ceil() as i64);
    let n = grid.n() as i64;
    if kmax >= n / 2 {
        return Err(ExperimentError::InvalidSpec(format!(
            "spectrum reaches |k| = {kmax}, grid resolves only |k| < {}",
            n / 2
        )));
    }
    let dim = grid.dim();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let side = (2 * kmax + 1) as usize;
    let lattice = side.pow(dim as u32);
    // raw[c][lattice index] for every wavevector in [-kmax, kmax]^dim
    let mut raw = vec![vec![Complex64::new(0.0, 0.0); lattice]; dim];
    let decode = |mut idx: usize| -> [i64; 3] {
        let mut m = [0i64; 3];
        for a in (0..dim).rev() {
            m[a] = (idx % side) as i64 - kmax;
            idx /= side;
        }
        m
    };
    for idx in 0..lattice {
        let m = decode(idx);
        let k = (m.iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt();
        for comp in raw.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if k > 0.0 && k <= kmax as f64 {
                let w = k.powf(-slope) * (-(k / cutoff).powi(2)).exp();
                comp[idx] = Complex64::new(re, im) * w;
            }
        }
    }
    let len = grid.len() as f64;
    let mut comps = Vec::with_capacity(dim);
    for comp in &raw {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        for idx in 0..lattice {
            let m = decode(idx);
            // Hermitian partner index
            let mut partner = 0usize;
            let mut flat = 0usize;
            for a in 0..dim {
                partner = partner * side + (kmax - m[a]) as usize;
                flat = flat * grid.n() + m[a].rem_euclid(n) as usize;
            }
            coeffs[flat] = 0.5 * (comp[idx] + comp[partner].conj()) * len;
        }
        comps.push(ScalarField::from_spectral(grid, coeffs));
    }
    let v = leray_project(&VectorField::new(comps)?);
    let ms = vector_l2_norm_sq(&v) / grid.volume();
    if ms == 0.0 {
        return Ok(v);
    }
    let target = 0.5 * amplitude * amplitude;
    Ok(v.scale((target / ms).sqrt()).canonical())
}

/// Build the initial state; velocity and magnetic field are Leray projected.
pub fn generate_initial(data: &InitialData) -> Result<State, ExperimentError> {
    let grid = data.grid.build()?;
    if !(data.amplitude_u.is_finite() && data.amplitude_h.is_finite()) {
        return Err(ExperimentError::InvalidSpec("amplitudes must be finite".into()));
    }
    let rho = density(&grid, &data.density)?;
    let zero = || VectorField::zeros(&grid);
    let (u, h) = match data.family {
        Family::TaylorGreen => (taylor_green(&grid, data.amplitude_u), zero()),
        Family::SingleModeMagnetic => (zero(), magnetic_mode(&grid, data.amplitude_h)),
        Family::Combined => (taylor_green(&grid, data.amplitude_u), magnetic_mode(&grid, data.amplitude_h)),
        Family::RandomSolenoidal { seed, slope, cutoff, kmax } => (
            random_solenoidal(&grid, seed, slope, cutoff, kmax, data.amplitude_u)?,
            random_solenoidal(&grid, seed.wrapping_add(0x9e37_79b9_7f4a_7c15), slope, cutoff, kmax, data.amplitude_h)?,
        ),
    };
    let u = leray_project(&u);
    let h = leray_project(&h);
    Ok(State::new(0.0, rho, u, h).canonical())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(family: Family, density: DensityProfile) -> InitialData {
        InitialData { family, amplitude_u: 1.0, amplitude_h: 0.5, density, grid: GridSpec::new(2, 32) }
    }

    #[test]
    fn vacuum_disk_profile() {
        let d = DensityProfile::VacuumDisk { radius: PI / 4.0, rho_bar: 1.0, band: None };
        let s = generate_initial(&data(Family::Combined, d)).unwrap();
        assert_eq!(s.rho.min(), 0.0);
        assert_eq!(s.rho.max(), 1.0);
        let zeros = s.rho.values().iter().filter(|&&v| v == 0.0).count();
        assert!(zeros > 4);
        assert!(s.rho.values().iter().any(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn random_field_is_deterministic_and_normalized() {
        let f = Family::RandomSolenoidal { seed: 7, slope: 1.0, cutoff: 3.0, kmax: None };
        let a = generate_initial(&data(f, DensityProfile::Constant { rho_bar: 1.0 })).unwrap();
        let b = generate_initial(&data(f, DensityProfile::Constant { rho_bar: 1.0 })).unwrap();
        assert_eq!(a.u.component(0).values(), b.u.component(0).values());
        let ms = vector_l2_norm_sq(&a.u) / a.grid().volume();
        assert!((ms - 0.5).abs() < 1e-12);
        assert!(a.div_u_relative() < 1e-12 && a.div_h_relative() < 1e-12);
    }

    #[test]
    fn random_field_is_grid_independent() {
        let g1 = Grid::new(2, 32, 2.0 * PI).unwrap();
        let g2 = Grid::new(2, 48, 2.0 * PI).unwrap();
        let a = random_solenoidal(&g1, 3, 1.0, 2.0, None, 1.0).unwrap();
        let b = random_solenoidal(&g2, 3, 1.0, 2.0, None, 1.0).unwrap();
        // coarse node i sits at fine node 3i/2 for even i
        let (av, bv) = (a.component(1).values(), b.component(1).values());
        for i in (0..32).step_by(2) {
            for j in (0..32).step_by(2) {
                let x = av[i * 32 + j];
                let y = bv[(3 * i / 2) * 48 + 3 * j / 2];
                assert!((x - y).abs() < 1e-12);
            }
        }
        assert!(random_solenoidal(&g1, 3, 1.0, 5.0, None, 1.0).is_err());
    }

    #[test]
    fn zero_amplitude_is_rest() {
        let mut d = data(Family::TaylorGreen, DensityProfile::SmoothBump { min: 0.5, max: 1.0 });
        d.amplitude_u = 0.0;
        let s = generate_initial(&d).unwrap();
        assert!(s.u.is_zero() && s.h.is_zero());
        assert!((s.rho.max() - 1.0).abs() < 1e-15 && s.rho.min() >= 0.5);
    }
}
