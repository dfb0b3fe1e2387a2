#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use gcalabi::exterior::Domain;
use gcalabi::scalar::ScalarField;
use gcalabi::surfaces::{build, manufacture_h_from_H, AlphaProfile, Family, SurfaceModel, SurfaceSpec};

pub fn calabi_spec(c: f64) -> SurfaceSpec {
    SurfaceSpec::calabi(
        AlphaProfile::constant(c).unwrap(),
        ScalarField::one(),
        ScalarField::zero(),
        ScalarField::x(),
        Domain::new((-0.5, 0.5), (-0.5, 0.5), (0.1, 1.0), (0.0, 1.0)),
    )
}

pub fn tan_spec() -> SurfaceSpec {
    let domain = Domain::new((-0.5, 0.5), (-0.5, 0.5), (0.1, 0.7), (0.0, 1.0));
    SurfaceSpec::generalized(Family::Tan, 1.0, ScalarField::one(), ScalarField::constant(FRAC_1_SQRT_2), domain)
        .unwrap()
}

/// `H = e^{x² + y²}` with `h` from the equation, `a = 0.1`.
pub fn coth_spec() -> SurfaceSpec {
    let domain = Domain::new((-0.25, 0.25), (-0.25, 0.25), (-3.0, -0.5), (0.0, 1.0));
    let big_h = (ScalarField::x().square() + ScalarField::y().square()).exp();
    let h = manufacture_h_from_H(&big_h, 0.1, Family::Coth, &domain).unwrap();
    SurfaceSpec::generalized(Family::Coth, 0.1, h, big_h, domain).unwrap()
}

pub fn tanh_spec() -> SurfaceSpec {
    let domain = Domain::new((-0.5, 0.5), (-0.5, 0.5), (-1.0, -0.1), (0.0, 1.0));
    SurfaceSpec::generalized(Family::Tanh, 1.0, ScalarField::one(), ScalarField::constant(FRAC_1_SQRT_2), domain)
        .unwrap()
}

pub fn family_specs() -> Vec<SurfaceSpec> {
    vec![calabi_spec(1.0), tan_spec(), coth_spec(), tanh_spec()]
}

pub fn family_models() -> Vec<SurfaceModel> {
    family_specs().iter().map(|s| build(s).unwrap()).collect()
}

/// Calabi with `(l₂, n₂) = (−y/2, x/2)`, on which sign flips of the
/// potentials are visible.
pub fn calabi_symmetric_spec() -> SurfaceSpec {
    let (x, y) = (ScalarField::x(), ScalarField::y());
    SurfaceSpec::calabi(
        AlphaProfile::constant(1.0).unwrap(),
        ScalarField::one(),
        -0.5 * &y,
        0.5 * &x,
        Domain::new((-0.5, 0.5), (-0.5, 0.5), (0.1, 1.0), (0.0, 1.0)),
    )
}
