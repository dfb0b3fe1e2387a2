use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::{ChartPoint, Coord, ScalarField};

use super::SurfaceError;

/// Which solution of `α′ = ½α² + D` a profile is.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaKind {
    Constant(f64),
    SemiSymmetric,
    Tan(f64),
    Coth(f64),
    Tanh(f64),
    UserDefined,
}

/// Branch requested from [`classify_alpha`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Tan,
    Coth,
    Tanh,
    Semi,
}

impl std::str::FromStr for Branch {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tan" => Ok(Branch::Tan),
            "coth" => Ok(Branch::Coth),
            "tanh" => Ok(Branch::Tanh),
            "semi" => Ok(Branch::Semi),
            other => Err(SurfaceError::Usage(format!(
                "unknown branch `{other}` (expected tan, coth, tanh or semi)"
            ))),
        }
    }
}

/// A profile `α(z)` together with a primitive `A` (`A′ = α`) and the open
/// z-interval on which `α` is finite and nonzero.
#[derive(Clone, Debug)]
pub struct AlphaProfile {
    kind: AlphaKind,
    alpha: ScalarField,
    primitive: ScalarField,
    interval: (f64, f64),
}

impl AlphaProfile {
    /// `α ≡ c`, `A = cz`.
    pub fn constant(c: f64) -> Result<AlphaProfile, SurfaceError> {
        if c == 0.0 || !c.is_finite() {
            return Err(SurfaceError::Usage(format!("constant α must be finite and nonzero, got {c}")));
        }
        let z = ScalarField::z();
        Ok(AlphaProfile {
            kind: AlphaKind::Constant(c),
            alpha: ScalarField::constant(c),
            primitive: c * &z,
            interval: (f64::NEG_INFINITY, f64::INFINITY),
        })
    }

    /// `α = −2/z`, `A = −ln z²`, taken on `z > 0`.
    pub fn semi_symmetric() -> AlphaProfile {
        let z = ScalarField::z();
        AlphaProfile {
            kind: AlphaKind::SemiSymmetric,
            alpha: -2.0 / &z,
            primitive: -z.square().ln(),
            interval: (0.0, f64::INFINITY),
        }
    }

    /// `α = 2a tan az`, `A = −ln cos² az`, on `0 < az < π/2`.
    pub fn tan(a: f64) -> Result<AlphaProfile, SurfaceError> {
        nonzero(a)?;
        let az = a * &ScalarField::z();
        let end = FRAC_PI_2 / a;
        Ok(AlphaProfile {
            kind: AlphaKind::Tan(a),
            alpha: 2.0 * a * &az.tan(),
            primitive: -az.cos().square().ln(),
            interval: (end.min(0.0), end.max(0.0)),
        })
    }

    /// `α = −2a coth az`, `A = −ln sinh² az`, on `z < 0`.
    pub fn coth(a: f64) -> Result<AlphaProfile, SurfaceError> {
        nonzero(a)?;
        let az = a * &ScalarField::z();
        Ok(AlphaProfile {
            kind: AlphaKind::Coth(a),
            alpha: -2.0 * a * &(az.cosh() / az.sinh()),
            primitive: -az.sinh().square().ln(),
            interval: (f64::NEG_INFINITY, 0.0),
        })
    }

    /// `α = −2a tanh az`, `A = −2 ln cosh az`, on `z < 0`.
    pub fn tanh(a: f64) -> Result<AlphaProfile, SurfaceError> {
        nonzero(a)?;
        let az = a * &ScalarField::z();
        Ok(AlphaProfile {
            kind: AlphaKind::Tanh(a),
            alpha: -2.0 * a * &az.tanh(),
            primitive: -2.0 * &az.cosh().ln(),
            interval: (f64::NEG_INFINITY, 0.0),
        })
    }

    /// User-supplied `α(z)` and `A(z)`; `A′ = α` and `α ≠ 0` are checked on
    /// the interval.
    pub fn user_defined(
        alpha: ScalarField,
        primitive: ScalarField,
        interval: (f64, f64),
    ) -> Result<AlphaProfile, SurfaceError> {
        for f in [&alpha, &primitive] {
            if [Coord::X, Coord::Y, Coord::T].iter().any(|&c| f.depends_on(c)) {
                return Err(SurfaceError::Usage(format!("`{f}` must depend on z only")));
            }
        }
        let profile = AlphaProfile {
            kind: AlphaKind::UserDefined,
            alpha,
            primitive,
            interval,
        };
        let da = profile.primitive.partial(Coord::Z)?;
        let mut worst = 0.0f64;
        for z in profile.probe(interval, 101) {
            let p = ChartPoint::new(0.0, 0.0, z, 0.0);
            let a = profile.alpha.eval(&p)?;
            if a == 0.0 || !a.is_finite() {
                return Err(SurfaceError::Domain(format!("α vanishes or is singular at z = {z}")));
            }
            worst = worst.max((da.eval(&p)? - a).abs());
        }
        if worst > 1e-10 {
            return Err(SurfaceError::Usage(format!("A′ differs from α by {worst:e}")));
        }
        Ok(profile)
    }

    pub fn kind(&self) -> AlphaKind {
        self.kind
    }

    pub fn alpha(&self) -> &ScalarField {
        &self.alpha
    }

    /// `A` with `A′ = α`.
    pub fn primitive(&self) -> &ScalarField {
        &self.primitive
    }

    /// Open z-interval on which the profile is finite and nonzero.
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    /// `β = e^A/α`, the Calabi type fiber factor.
    pub fn calabi_beta(&self) -> ScalarField {
        self.primitive.exp() / &self.alpha
    }

    /// `D = α′ − ½α²`, constant for every profile except user-defined ones.
    pub fn d_value(&self) -> Option<f64> {
        match self.kind {
            AlphaKind::Tan(a) => Some(2.0 * a * a),
            AlphaKind::Coth(a) | AlphaKind::Tanh(a) => Some(-2.0 * a * a),
            AlphaKind::SemiSymmetric => Some(0.0),
            AlphaKind::Constant(c) => Some(-0.5 * c * c),
            AlphaKind::UserDefined => None,
        }
    }

    /// Evenly spaced z values strictly inside `within ∩ interval`, falling
    /// back to a bounded window when an end is infinite.
    pub(crate) fn probe(&self, within: (f64, f64), n: usize) -> Vec<f64> {
        let lo = within.0.max(self.interval.0);
        let hi = within.1.min(self.interval.1);
        let (lo, hi) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo, hi),
            (true, false) => (lo, lo + 4.0),
            (false, true) => (hi - 4.0, hi),
            (false, false) => (-2.0, 2.0),
        };
        let pad = 1e-3 * (hi - lo);
        (0..n)
            .map(|k| lo + pad + (hi - lo - 2.0 * pad) * k as f64 / (n - 1).max(1) as f64)
            .collect()
    }
}

impl fmt::Display for AlphaProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α = {}, A = {}", self.alpha, self.primitive)
    }
}

fn nonzero(a: f64) -> Result<(), SurfaceError> {
    if a == 0.0 || !a.is_finite() {
        return Err(SurfaceError::Usage(format!("parameter a must be finite and nonzero, got {a}")));
    }
    Ok(())
}

/// Solve `α′ = ½α² + D` for `α` depending on `z` only.
///
/// `D > 0` admits only `tan` (the default), `D = 0` only `semi` (the
/// default), and `D < 0` needs `coth` or `tanh` named explicitly.
pub fn classify_alpha(d: f64, branch: Option<Branch>) -> Result<AlphaProfile, SurfaceError> {
    if !d.is_finite() {
        return Err(SurfaceError::Usage(format!("D must be finite, got {d}")));
    }
    let mismatch = |b: Branch| {
        SurfaceError::Usage(format!(
            "branch {b:?} is inconsistent with D = {d} (D > 0: tan, D = 0: semi, D < 0: coth or tanh)"
        ))
    };
    let profile = if d > 0.0 {
        match branch.unwrap_or(Branch::Tan) {
            Branch::Tan => AlphaProfile::tan((d / 2.0).sqrt())?,
            b => return Err(mismatch(b)),
        }
    } else if d < 0.0 {
        let a = (-d / 2.0).sqrt();
        match branch {
            Some(Branch::Coth) => AlphaProfile::coth(a)?,
            Some(Branch::Tanh) => AlphaProfile::tanh(a)?,
            Some(b) => return Err(mismatch(b)),
            None => return Err(SurfaceError::Usage(format!("D = {d} < 0: choose branch coth or tanh"))),
        }
    } else {
        match branch.unwrap_or(Branch::Semi) {
            Branch::Semi => AlphaProfile::semi_symmetric(),
            b => return Err(mismatch(b)),
        }
    };
    let (ode, second) = ode_residuals(&profile, d)?;
    if ode > 1e-10 || second > 1e-10 {
        return Err(SurfaceError::Usage(format!(
            "profile fails its ODE: |α′ − ½α² − D| = {ode:e}, |α″ − αα′| = {second:e}"
        )));
    }
    Ok(profile)
}

/// Max of `|α′ − ½α² − D|` and `|α″ − αα′|`, scaled by `1 + |α′|`, along the
/// profile's interval.
pub fn ode_residuals(profile: &AlphaProfile, d: f64) -> Result<(f64, f64), SurfaceError> {
    let a = profile.alpha();
    let a1 = a.partial(Coord::Z)?;
    let a2 = a1.partial(Coord::Z)?;
    let (mut ode, mut second) = (0.0f64, 0.0f64);
    for z in profile.probe(profile.interval(), 64) {
        let p = ChartPoint::new(0.0, 0.0, z, 0.0);
        let (v, v1, v2) = (a.eval(&p)?, a1.eval(&p)?, a2.eval(&p)?);
        let scale = 1.0 + v1.abs();
        ode = ode.max((v1 - 0.5 * v * v - d).abs() / scale);
        second = second.max((v2 - v * v1).abs() / (scale * (1.0 + v.abs())));
    }
    Ok((ode, second))
}
