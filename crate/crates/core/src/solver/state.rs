use crate::field::{divergence, norms, ScalarField, VectorField};

/// Solution tuple `(t, rho, u, H)` plus the most recent pressure.
#[derive(Clone, Debug)]
pub struct State {
    pub t: f64,
    pub rho: ScalarField,
    pub u: VectorField,
    pub h: VectorField,
    pub p: ScalarField,
}

impl State {
    /// State at time `t` with zero pressure.
    pub fn new(t: f64, rho: ScalarField, u: VectorField, h: VectorField) -> Self {
        let p = ScalarField::zeros(rho.grid());
        State { t, rho, u, h, p }
    }

    pub fn grid(&self) -> &std::sync::Arc<crate::field::Grid> {
        self.rho.grid()
    }

    /// Every field rebuilt from its real samples only.
    pub fn canonical(&self) -> Self {
        State {
            t: self.t,
            rho: self.rho.canonical(),
            u: self.u.canonical(),
            h: self.h.canonical(),
            p: self.p.canonical(),
        }
    }

    /// `||div u|| / ||u||`, zero for a vanishing field.
    pub fn div_u_relative(&self) -> f64 {
        relative_divergence(&self.u)
    }

    pub fn div_h_relative(&self) -> f64 {
        relative_divergence(&self.h)
    }

    /// Real-space fields in checkpoint order: rho, u_*, h_*, p.
    pub fn named_fields(&self) -> Vec<(String, &ScalarField)> {
        let axes = ["x", "y", "z"];
        let mut out = vec![("rho".to_string(), &self.rho)];
        for (a, c) in self.u.components().iter().enumerate() {
            out.push((format!("u_{}", axes[a]), c));
        }
        for (a, c) in self.h.components().iter().enumerate() {
            out.push((format!("h_{}", axes[a]), c));
        }
        out.push(("p".to_string(), &self.p));
        out
    }
}

pub(crate) fn relative_divergence(v: &VectorField) -> f64 {
    let norm = norms::vector_l2_norm(v);
    if norm == 0.0 {
        return 0.0;
    }
    norms::l2_norm(&divergence(v)) / norm
}
