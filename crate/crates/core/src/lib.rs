//! Generalized Calabi type Kähler surfaces.
//!
//! Builds the explicit metric families (Calabi type, and the `tan`, `coth`
//! and `tanh` generalized families), computes their Levi-Civita connection
//! and curvature through Cartan's structure equations, solves the
//! Liouville-type equation for the profile `H`, and checks the Hermitian
//! identities the constructions are meant to satisfy.

pub mod scalar;
pub mod exterior;
pub mod cartan;
pub mod surfaces;
pub mod pde;
pub mod verify;
