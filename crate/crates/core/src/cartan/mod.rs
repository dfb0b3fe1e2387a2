//! Levi-Civita connection and curvature of an orthonormal frame through
//! Cartan's structure equations.
//!
//! Index conventions (0-based in code): `∇_{E_k} E_j = Σ_i Γ^i_{kj} E_i`,
//! `ω^i_j = Σ_k Γ^i_{kj} θ_k`, `R(E_a, E_b) E_c = Σ_d Ω^d_c(E_a, E_b) E_d`.

mod connection;
mod curvature;

use thiserror::Error;

use crate::scalar::FieldError;

pub use connection::{solve_connection, ConnectionForms, StructureFunctions};
pub use curvature::{
    covariant_derivative_2form, curvature, holomorphic_curvature, sectional_curvature, ComplexStructure,
    CovariantDerivative2, Curvature, CurvatureData,
};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CartanError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("coframe is degenerate at (x, y, z, t) = {point:?} (determinant {det:e})")]
    DegenerateCoframe { point: [f64; 4], det: f64 },
    #[error("vectors do not span a plane")]
    DegeneratePlane,
    #[error("holomorphic curvature needs a unit vector, got norm {norm}")]
    NotUnit { norm: f64 },
}

#[cfg(test)]
mod tests;
