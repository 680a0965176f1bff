//! Spectral differentiation, dealiased products and the Leray projection.

use rustfft::num_complex::Complex64;

use super::{FieldError, ScalarField, VectorField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `d f / d x_axis`, exact for every resolved mode.
pub fn partial(f: &ScalarField, axis: usize) -> ScalarField {
    let k = f.grid().deriv_wavenumber(axis);
    f.map_spectral(|i, c| I * c * k[i])
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let dim = f.grid().dim();
    VectorField::from_components_unchecked((0..dim).map(|a| partial(f, a)).collect())
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let grid = v.grid();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (axis, c) in v.components().iter().enumerate() {
        let k = grid.deriv_wavenumber(axis);
        for ((o, z), kk) in out.iter_mut().zip(c.coefficients()).zip(k) {
            *o += I * z * *kk;
        }
    }
    ScalarField::from_spectral(grid, out)
}

/// Curl of a vector field: a scalar in 2D, a vector in 3D.
#[derive(Clone, Debug)]
pub enum Curl {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl Curl {
    /// `||curl v||_2^2` by Parseval.
    pub fn norm_sq(&self) -> f64 {
        match self {
            Curl::Scalar(s) => super::norms::l2_norm_sq(s),
            Curl::Vector(v) => super::norms::vector_l2_norm_sq(v),
        }
    }
}

pub fn curl(v: &VectorField) -> Curl {
    let d = |c: usize, a: usize| partial(v.component(c), a);
    if v.dim() == 2 {
        Curl::Scalar(d(1, 0).sub(&d(0, 1)))
    } else {
        Curl::Vector(VectorField::from_components_unchecked(vec![
            d(2, 1).sub(&d(1, 2)),
            d(0, 2).sub(&d(2, 0)),
            d(1, 0).sub(&d(0, 1)),
        ]))
    }
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let k2 = f.grid().k_squared();
    f.map_spectral(|i, c| -c * k2[i])
}

pub fn vector_laplacian(v: &VectorField) -> VectorField {
    v.map(laplacian)
}

/// Zero every mode outside the 2/3 ball. Identity on grids built without
/// dealiasing.
pub fn truncate(f: &ScalarField) -> ScalarField {
    if !f.grid().dealiasing() {
        return f.clone();
    }
    let keep = f.grid().dealias_mask();
    f.map_spectral(|i, c| if keep[i] { c } else { Complex64::new(0.0, 0.0) })
}

/// Pointwise product followed by the 2/3-rule truncation.
pub fn dealiased_product(f: &ScalarField, g: &ScalarField) -> Result<ScalarField, FieldError> {
    if !f.same_grid(g) {
        return Err(FieldError::GridMismatch);
    }
    Ok(product(f, g))
}

pub(crate) fn product(f: &ScalarField, g: &ScalarField) -> ScalarField {
    truncate(&f.mul_pointwise(g))
}

/// Dealiased `(a . grad) b`, component `i` being `sum_j a_j d_j b_i`.
pub fn advective_derivative(a: &VectorField, b: &VectorField) -> VectorField {
    let grid = a.grid();
    let comps = b
        .components()
        .iter()
        .map(|bi| {
            let mut acc = vec![0.0; grid.len()];
            for (j, aj) in a.components().iter().enumerate() {
                let dj = partial(bi, j);
                for ((o, x), y) in acc.iter_mut().zip(aj.values()).zip(dj.values()) {
                    *o += x * y;
                }
            }
            truncate(&ScalarField::from_real(grid, acc))
        })
        .collect();
    VectorField::from_components_unchecked(comps)
}

/// Orthogonal projection onto divergence-free fields, `I - k k^T / |k|^2`
/// per mode. Modes with vanishing derivative wavenumber (the mean and pure
/// Nyquist modes) pass through unchanged.
pub fn leray_project(v: &VectorField) -> VectorField {
    let grid = v.grid();
    let dim = v.dim();
    let kd2 = grid.kd_squared();
    let k: Vec<&[f64]> = (0..dim).map(|a| grid.deriv_wavenumber(a)).collect();
    let src: Vec<&[Complex64]> = v.components().iter().map(ScalarField::coefficients).collect();
    let mut out: Vec<Vec<Complex64>> = src.iter().map(|s| s.to_vec()).collect();
    for idx in 0..grid.len() {
        if kd2[idx] == 0.0 {
            continue;
        }
        let mut kv = Complex64::new(0.0, 0.0);
        for a in 0..dim {
            kv += src[a][idx] * k[a][idx];
        }
        let s = kv / kd2[idx];
        for a in 0..dim {
            out[a][idx] -= s * k[a][idx];
        }
    }
    VectorField::from_components_unchecked(
        out.into_iter().map(|c| ScalarField::from_spectral(grid, c)).collect(),
    )
}
