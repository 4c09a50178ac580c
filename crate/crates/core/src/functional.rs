//! The shape-optimization target: a weighted sum of the squared
//! displacement norm and the stored elastic energy.

use crate::elasticity::{mass_form, material_strain_form, Displacement, MaterialModel};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Weights of the two quadratic terms; not both zero.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalWeights {
    pub c1: f64,
    pub c2: f64,
}

impl FunctionalWeights {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 >= 0.0 && c2 >= 0.0) {
            return Err(Error::Numeric("weights must be nonnegative".into()));
        }
        if c1 == 0.0 && c2 == 0.0 {
            return Err(Error::Numeric("weights must not both vanish".into()));
        }
        Ok(FunctionalWeights { c1, c2 })
    }

    /// Pure compliance weighting.
    pub fn compliance() -> Self {
        FunctionalWeights { c1: 0.0, c2: 1.0 }
    }
}

/// `J(v) = c1 ∫ |v|^2 + c2 ∫ sigma(v) : e(v)`; nonnegative.
pub fn energy_functional(
    mesh: &Mesh,
    material: &MaterialModel,
    v: &Displacement,
    weights: FunctionalWeights,
) -> f64 {
    weights.c1 * mass_form(mesh, v) + weights.c2 * material_strain_form(mesh, material, v)
}

/// Stored elastic energy of the displacement.
pub fn compliance(mesh: &Mesh, material: &MaterialModel, u: &Displacement) -> f64 {
    energy_functional(mesh, material, u, FunctionalWeights::compliance())
}
