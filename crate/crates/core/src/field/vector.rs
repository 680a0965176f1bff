use std::sync::Arc;

use super::{FieldError, Grid, ScalarField};

/// `dim` scalar components on one shared grid.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self, FieldError> {
        let first = components.first().ok_or(FieldError::Dimension { expected: 2, got: 0 })?;
        let dim = first.grid().dim();
        if components.len() != dim {
            return Err(FieldError::Dimension { expected: dim, got: components.len() });
        }
        if components.iter().any(|c| !c.same_grid(first)) {
            return Err(FieldError::GridMismatch);
        }
        Ok(VectorField { components })
    }

    pub(crate) fn from_components_unchecked(components: Vec<ScalarField>) -> Self {
        debug_assert!(!components.is_empty());
        debug_assert_eq!(components.len(), components[0].grid().dim());
        VectorField { components }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        VectorField {
            components: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    /// Sample a vector-valued function; only the first `dim` entries are used.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let dim = grid.dim();
        let mut comps = vec![Vec::with_capacity(grid.len()); dim];
        for i in 0..grid.len() {
            let v = f(grid.coords(i));
            for (a, c) in comps.iter_mut().enumerate() {
                c.push(v[a]);
            }
        }
        VectorField {
            components: comps.into_iter().map(|v| ScalarField::from_real(grid, v)).collect(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &ScalarField {
        &self.components[axis]
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }

    pub fn same_grid(&self, other: &VectorField) -> bool {
        self.components[0].same_grid(&other.components[0])
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        VectorField { components: self.components.iter().map(f).collect() }
    }

    pub fn zip_map(&self, other: &VectorField, f: impl Fn(&ScalarField, &ScalarField) -> ScalarField) -> Self {
        VectorField {
            components: self.components.iter().zip(&other.components).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn lincomb(&self, a: f64, other: &VectorField, b: f64) -> Self {
        self.zip_map(other, |x, y| x.lincomb(a, y, b))
    }

    pub fn add(&self, other: &VectorField) -> Self {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &VectorField) -> Self {
        self.lincomb(1.0, other, -1.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|c| c.scale(a))
    }

    pub fn canonical(&self) -> Self {
        self.map(ScalarField::canonical)
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let grid = self.grid();
        let mut out = vec![0.0; grid.len()];
        for c in &self.components {
            for (o, v) in out.iter_mut().zip(c.values()) {
                *o += v * v;
            }
        }
        ScalarField::from_real(grid, out.into_iter().map(f64::sqrt).collect())
    }

    /// Largest pointwise magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.magnitude().max()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarField::is_zero)
    }
}
