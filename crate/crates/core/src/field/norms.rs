//! Integrals and norms on the periodic box.
//!
//! L2-type quantities go through Parseval on the spectral coefficients;
//! every other Lp norm is a rectangle-rule quadrature with cell weight
//! `(L/n)^dim`. Vector norms use the pointwise Euclidean magnitude, tensor
//! norms the pointwise Frobenius magnitude.

use super::calculus::partial;
use super::{ScalarField, VectorField};

fn parseval_weight(f: &ScalarField) -> f64 {
    let g = f.grid();
    g.volume() / (g.len() as f64 * g.len() as f64)
}

fn weighted_power(f: &ScalarField, weight: impl Fn(usize) -> f64) -> f64 {
    let s: f64 = f
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| weight(i) * c.norm_sqr())
        .sum();
    s * parseval_weight(f)
}

/// `int f g dx` via Parseval.
pub fn inner_product(f: &ScalarField, g: &ScalarField) -> f64 {
    debug_assert!(f.same_grid(g));
    let s: f64 = f
        .coefficients()
        .iter()
        .zip(g.coefficients())
        .map(|(a, b)| a.re * b.re + a.im * b.im)
        .sum();
    s * parseval_weight(f)
}

/// `int f g dx` by direct quadrature of the real samples.
pub fn quadrature_inner_product(f: &ScalarField, g: &ScalarField) -> f64 {
    let s: f64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
    s * f.grid().cell_volume()
}

pub fn l2_norm_sq(f: &ScalarField) -> f64 {
    weighted_power(f, |_| 1.0)
}

pub fn l2_norm(f: &ScalarField) -> f64 {
    l2_norm_sq(f).sqrt()
}

/// Quadrature of an arbitrary nonnegative sample array.
pub fn integrate_samples(grid: &super::Grid, samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() * grid.cell_volume()
}

pub fn integral(f: &ScalarField) -> f64 {
    integrate_samples(f.grid(), f.values())
}

fn lp_from_samples(grid: &super::Grid, abs: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        return abs.fold(0.0, f64::max);
    }
    let s: f64 = abs.map(|a| a.powf(p)).sum();
    (s * grid.cell_volume()).powf(1.0 / p)
}

/// `||f||_p`; `p = 2` uses Parseval, `p = inf` the sample maximum.
pub fn lp_norm(f: &ScalarField, p: f64) -> f64 {
    assert!(p >= 1.0, "Lp norm needs p >= 1");
    if p == 2.0 {
        return l2_norm(f);
    }
    lp_from_samples(f.grid(), f.values().iter().map(|v| v.abs()), p)
}

pub fn vector_inner_product(a: &VectorField, b: &VectorField) -> f64 {
    a.components().iter().zip(b.components()).map(|(x, y)| inner_product(x, y)).sum()
}

pub fn vector_l2_norm_sq(v: &VectorField) -> f64 {
    v.components().iter().map(l2_norm_sq).sum()
}

pub fn vector_l2_norm(v: &VectorField) -> f64 {
    vector_l2_norm_sq(v).sqrt()
}

pub fn vector_lp_norm(v: &VectorField, p: f64) -> f64 {
    assert!(p >= 1.0, "Lp norm needs p >= 1");
    if p == 2.0 {
        return vector_l2_norm(v);
    }
    let mag = v.magnitude();
    lp_from_samples(v.grid(), mag.values().iter().copied(), p)
}

/// `||grad v||_2^2 = sum |k|^2 |v_k|^2`.
pub fn h1_seminorm_sq(v: &VectorField) -> f64 {
    let kd2 = v.grid().kd_squared();
    v.components().iter().map(|c| weighted_power(c, |i| kd2[i])).sum()
}

pub fn sobolev_h1_seminorm(v: &VectorField) -> f64 {
    h1_seminorm_sq(v).sqrt()
}

/// `||grad^2 v||_2^2`, all second partials; equals `||lap v||_2^2` on the torus.
pub fn d2_seminorm_sq(v: &VectorField) -> f64 {
    let kd2 = v.grid().kd_squared();
    v.components().iter().map(|c| weighted_power(c, |i| kd2[i] * kd2[i])).sum()
}

/// `||v||_{H^2} = (||v||^2 + ||grad v||^2 + ||grad^2 v||^2)^{1/2}`.
pub fn sobolev_h2_norm(v: &VectorField) -> f64 {
    (vector_l2_norm_sq(v) + h1_seminorm_sq(v) + d2_seminorm_sq(v)).sqrt()
}

pub fn scalar_h1_seminorm(f: &ScalarField) -> f64 {
    let kd2 = f.grid().kd_squared();
    weighted_power(f, |i| kd2[i]).sqrt()
}

/// Pointwise `|grad v|^2 = sum_{i,l} (d_i v_l)^2`.
pub fn gradient_magnitude_sq(v: &VectorField) -> Vec<f64> {
    let grid = v.grid();
    let mut out = vec![0.0; grid.len()];
    for c in v.components() {
        for axis in 0..grid.dim() {
            let d = partial(c, axis);
            for (o, x) in out.iter_mut().zip(d.values()) {
                *o += x * x;
            }
        }
    }
    out
}

/// Pointwise `|grad^2 v|^2 = sum_{i,j,l} (d_i d_j v_l)^2`.
pub fn hessian_magnitude_sq(v: &VectorField) -> Vec<f64> {
    let grid = v.grid();
    let dim = grid.dim();
    let mut out = vec![0.0; grid.len()];
    for c in v.components() {
        for i in 0..dim {
            let di = partial(c, i);
            for j in i..dim {
                let dij = partial(&di, j);
                let w = if i == j { 1.0 } else { 2.0 };
                for (o, x) in out.iter_mut().zip(dij.values()) {
                    *o += w * x * x;
                }
            }
        }
    }
    out
}

fn l6_of_sq(grid: &super::Grid, sq: &[f64]) -> f64 {
    lp_from_samples(grid, sq.iter().map(|s| s.sqrt()), 6.0)
}

pub fn l6_norm_gradient(v: &VectorField) -> f64 {
    l6_of_sq(v.grid(), &gradient_magnitude_sq(v))
}

pub fn l6_norm_second_derivatives(v: &VectorField) -> f64 {
    l6_of_sq(v.grid(), &hessian_magnitude_sq(v))
}

/// `||v||_6 + ||grad v||_6 + ||grad^2 v||_6`.
pub fn w26_norm(v: &VectorField) -> f64 {
    vector_lp_norm(v, 6.0) + l6_norm_gradient(v) + l6_norm_second_derivatives(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use std::f64::consts::PI;

    #[test]
    fn sine_norm_is_two_pi_squared() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0].sin());
        assert!((l2_norm_sq(&f) - 2.0 * PI * PI).abs() < 1e-12);
        // quadrature agrees for a resolved mode
        assert!((lp_norm(&f, 4.0).powi(4) - 4.0 * PI * PI * 3.0 / 8.0).abs() < 1e-11);
        assert!((lp_norm(&f, f64::INFINITY) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn zero_field_norms() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        let z = ScalarField::zeros(&g);
        for p in [2.0, 3.0, 4.0, 6.0] {
            assert_eq!(lp_norm(&z, p), 0.0);
        }
        let v = VectorField::zeros(&g);
        assert_eq!(sobolev_h2_norm(&v), 0.0);
        assert_eq!(w26_norm(&v), 0.0);
    }

    #[test]
    fn hessian_norm_matches_spectral() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let v = VectorField::from_fn(&g, |x| [(2.0 * x[1]).sin(), (x[0] + x[1]).cos(), 0.0]);
        let quad = integrate_samples(&g, &hessian_magnitude_sq(&v));
        assert!((quad - d2_seminorm_sq(&v)).abs() < 1e-10 * quad);
        let grad = integrate_samples(&g, &gradient_magnitude_sq(&v));
        assert!((grad - h1_seminorm_sq(&v)).abs() < 1e-10 * grad);
    }
}
