//! Differential forms on the chart, vector fields, orthonormal frames and
//! the Hodge star.

mod form;
mod frame;
mod vector;

pub use form::{KForm, Mask, NumForm};
pub use frame::{codifferential, dual_frame, hodge_star, sd_asd_split, Domain, ExteriorError, FrameAt, FramePair};
pub use vector::{lie_bracket, VectorField};

