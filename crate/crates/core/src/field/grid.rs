use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::FieldError;

/// Uniform periodic grid on `[0, L)^dim` together with its FFT plans and
/// per-mode wavenumber tables.
///
/// Layout is row-major: the flat index of `(i0, i1, i2)` is
/// `(i0 * n + i1) * n + i2`, axis 0 varies slowest.
///
/// Spectral conventions:
/// * the forward transform is unnormalized, the inverse carries `1/n^dim`;
/// * integer mode numbers run over `0..n/2-1, -n/2..-1`, the Nyquist mode
///   is stored as `-n/2`;
/// * first-derivative symbols (`gradient`, `divergence`, `curl`, Leray
///   projection, all gradient norms) zero the Nyquist component on the
///   affected axis, while the Laplacian symbol `-|k|^2` keeps it.
pub struct Grid {
    dim: usize,
    n: usize,
    box_length: f64,
    dealias: bool,
    len: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
    deriv: [Vec<f64>; 3],
    k2: Vec<f64>,
    kd2: Vec<f64>,
    keep: Vec<bool>,
}

impl Grid {
    /// Grid with the 2/3 dealiasing rule enabled.
    pub fn new(dim: usize, n: usize, box_length: f64) -> Result<Arc<Self>, FieldError> {
        Self::build(dim, n, box_length, true)
    }

    /// Same grid with products left aliased. Only used as a negative control.
    pub fn without_dealiasing(dim: usize, n: usize, box_length: f64) -> Result<Arc<Self>, FieldError> {
        Self::build(dim, n, box_length, false)
    }

    fn build(dim: usize, n: usize, box_length: f64, dealias: bool) -> Result<Arc<Self>, FieldError> {
        if dim != 2 && dim != 3 {
            return Err(FieldError::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(FieldError::InvalidGrid(format!("n must be even and >= 8, got {n}")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(FieldError::InvalidGrid(format!("box length must be positive, got {box_length}")));
        }
        let len = n.pow(dim as u32);
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);

        let scale = 2.0 * PI / box_length;
        let half = n as i64 / 2;
        let modes: Vec<i64> = (0..n as i64).map(|i| if i < half { i } else { i - n as i64 }).collect();
        let wavenumbers: Vec<f64> = modes.iter().map(|&m| m as f64 * scale).collect();
        let deriv_axis: Vec<f64> = modes
            .iter()
            .map(|&m| if m == -half { 0.0 } else { m as f64 * scale })
            .collect();

        let radius = n as f64 / 3.0;
        let mut deriv = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        let mut k2 = vec![0.0; len];
        let mut kd2 = vec![0.0; len];
        let mut keep = vec![false; len];
        for idx in 0..len {
            let mut m2 = 0.0;
            let mut rem = idx;
            for axis in (0..dim).rev() {
                let i = rem % n;
                rem /= n;
                let m = modes[i] as f64;
                m2 += m * m;
                k2[idx] += wavenumbers[i] * wavenumbers[i];
                deriv[axis][idx] = deriv_axis[i];
                kd2[idx] += deriv_axis[i] * deriv_axis[i];
            }
            keep[idx] = m2 <= radius * radius;
        }

        Ok(Arc::new(Grid {
            dim,
            n,
            box_length,
            dealias,
            len,
            fft,
            ifft,
            wavenumbers,
            deriv,
            k2,
            kd2,
            keep,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dealiasing(&self) -> bool {
        self.dealias
    }

    /// Number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Quadrature weight `(L/n)^dim` of a single grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Per-axis wavenumbers `2*pi*m/L`, Nyquist stored as negative.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// First-derivative wavenumber along `axis` for every flat mode index.
    pub fn deriv_wavenumber(&self, axis: usize) -> &[f64] {
        &self.deriv[axis]
    }

    /// `|k|^2` including Nyquist components (Laplacian symbol).
    pub fn k_squared(&self) -> &[f64] {
        &self.k2
    }

    /// `|k_d|^2` built from the first-derivative wavenumbers.
    pub fn kd_squared(&self) -> &[f64] {
        &self.kd2
    }

    /// Modes retained by the 2/3 rule: integer mode radius `<= n/3`.
    pub fn dealias_mask(&self) -> &[bool] {
        &self.keep
    }

    /// Coordinates of the grid point with flat index `idx`.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let mut x = [0.0; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            x[axis] = (rem % self.n) as f64 * h;
            rem /= self.n;
        }
        x
    }

    /// Whether two grids describe the same discretization.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.n == other.n
            && self.box_length == other.box_length
            && self.dealias == other.dealias
    }

    /// Same sampling with a different box length (used by the scaling map).
    pub fn with_box_length(&self, box_length: f64) -> Result<Arc<Self>, FieldError> {
        Self::build(self.dim, self.n, box_length, self.dealias)
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fft);
    }

    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.ifft);
        let norm = 1.0 / self.len as f64;
        for c in data.iter_mut() {
            *c *= norm;
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(data.len(), self.len);
        let n = self.n;
        let lines = self.len / n;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                run_lines(plan, data, n);
                continue;
            }
            for line in 0..lines {
                let base = (line / stride) * stride * n + line % stride;
                let dst = &mut buf[line * n..(line + 1) * n];
                for (j, d) in dst.iter_mut().enumerate() {
                    *d = data[base + j * stride];
                }
            }
            run_lines(plan, &mut buf, n);
            for line in 0..lines {
                let base = (line / stride) * stride * n + line % stride;
                let src = &buf[line * n..(line + 1) * n];
                for (j, s) in src.iter().enumerate() {
                    data[base + j * stride] = *s;
                }
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn run_lines(plan: &Arc<dyn Fft<f64>>, data: &mut [Complex64], n: usize) {
    use rayon::prelude::*;
    const LINES_PER_TASK: usize = 256;
    if data.len() >= 1 << 15 && rayon::current_num_threads() > 1 {
        data.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| plan.process(chunk));
    } else {
        plan.process(data);
    }
}

#[cfg(not(feature = "parallel"))]
fn run_lines(plan: &Arc<dyn Fft<f64>>, data: &mut [Complex64], _n: usize) {
    plan.process(data);
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("box_length", &self.box_length)
            .field("dealias", &self.dealias)
            .finish()
    }
}
