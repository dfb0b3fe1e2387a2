//! The explicit generalized Calabi type families and the profile
//! classification they rest on.
//!
//! Every builder returns a [`SurfaceModel`]: an orthonormal coframe in the
//! chart `(x, y, z, t)` with `E₄ = ∂z` and `E₃ ∝ ∂t`, the profile `α(z)`,
//! the Kähler form `Ω̄ = θ₁∧θ₂ − θ₃∧θ₄` of the opposite structure, and the
//! Hermitian form `Ω = θ₁∧θ₂ + θ₃∧θ₄` with Lee form `−αθ₄`.

mod alpha;
mod builders;
mod potential;

use thiserror::Error;

use crate::exterior::ExteriorError;
use crate::scalar::FieldError;

pub use alpha::{classify_alpha, ode_residuals, AlphaKind, AlphaProfile, Branch};
pub use builders::{
    build, build_calabi, build_coth, build_tan, build_tanh, gradient_potentials, manufacture_h_from_H, BuildOptions,
    Family, Mutation, SurfaceId, SurfaceModel, SurfaceSpec,
};
pub use potential::{potential_from_closed_form, volume_potential};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SurfaceError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("p dx + q dy is not closed: |p_y − q_x| = {max_residual:e} at (x, y, z, t) = {point:?}")]
    NotClosed { max_residual: f64, point: [f64; 4] },
    #[error("{name} must be positive, got {value} at (x, y) = {point:?}")]
    NotPositive { name: String, value: f64, point: [f64; 2] },
    #[error("build rejected: {reason} (residual {residual:e} at (x, y, z, t) = {point:?})")]
    Rejected { reason: String, residual: f64, point: [f64; 4] },
    #[error("manufactured solution infeasible: h² = {value} at (x, y) = {point:?}")]
    Infeasible { value: f64, point: [f64; 2] },
}
