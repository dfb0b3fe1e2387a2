use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::ComplexStructure;
use crate::exterior::{Domain, FramePair, KForm, VectorField};
use crate::scalar::{ChartPoint, Coord, ScalarField};

use super::alpha::{AlphaKind, AlphaProfile};
use super::potential::{check_positive, worst, xy_lattice};
use super::SurfaceError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Calabi,
    Tan,
    Coth,
    Tanh,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Calabi => "calabi",
            Family::Tan => "tan",
            Family::Coth => "coth",
            Family::Tanh => "tanh",
        }
    }

    /// `(c₁, c₂)` in `Δ ln H = c₁h² + c₂H²`; `None` for the Calabi family.
    pub fn pde_coefficients(self, a: f64) -> Option<(f64, f64)> {
        let s = 2.0 * a * a;
        match self {
            Family::Calabi => None,
            Family::Tan => Some((s, -2.0 * s)),
            Family::Coth => Some((s, 2.0 * s)),
            Family::Tanh => Some((-s, 2.0 * s)),
        }
    }

    /// Sectional curvature of `span{E₃, E₄}`.
    pub fn fiber_curvature(self, a: f64) -> Option<f64> {
        match self {
            Family::Calabi => None,
            Family::Tan => Some(4.0 * a * a),
            Family::Coth | Family::Tanh => Some(-4.0 * a * a),
        }
    }

    /// `σ` in `l₂ = −σ(ln H)_y/2a`, `n₂ = σ(ln H)_x/2a`.
    fn gradient_sign(self) -> f64 {
        match self {
            Family::Coth => -1.0,
            _ => 1.0,
        }
    }

    fn profile(self, a: f64) -> Result<AlphaProfile, SurfaceError> {
        match self {
            Family::Tan => AlphaProfile::tan(a),
            Family::Coth => AlphaProfile::coth(a),
            Family::Tanh => AlphaProfile::tanh(a),
            Family::Calabi => Err(SurfaceError::Usage("the calabi family takes an explicit α profile".into())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "calabi" => Ok(Family::Calabi),
            "tan" => Ok(Family::Tan),
            "coth" => Ok(Family::Coth),
            "tanh" => Ok(Family::Tanh),
            other => Err(SurfaceError::Usage(format!(
                "unknown family `{other}` (expected calabi, tan, coth or tanh)"
            ))),
        }
    }
}

/// Single-sign corruptions of `θ₃`, used to probe the checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Negate the `dt` coefficient.
    NegateDt,
    /// Negate the `H` term of the `dx` coefficient (all of it for Calabi).
    NegateDx,
    /// Negate the `H` term of the `dy` coefficient (all of it for Calabi).
    NegateDy,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [Mutation::NegateDt, Mutation::NegateDx, Mutation::NegateDy];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Absolute tolerance for the potential, PDE and gradient-relation
    /// checks.
    pub tolerance: f64,
    /// Use `(−l₂, −n₂)` in `θ₃` after the input checks.
    pub flip_potentials: bool,
    pub mutation: Option<Mutation>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            tolerance: 1e-8,
            flip_potentials: false,
            mutation: None,
        }
    }
}

/// Input data of a builder.
#[derive(Clone, Debug)]
pub struct SurfaceSpec {
    pub family: Family,
    /// Parameter `a` of the generalized families.
    pub a: Option<f64>,
    /// Profile of the Calabi family.
    pub alpha: Option<AlphaProfile>,
    /// Conformal factor of `g_Σ = h²(dx² + dy²)`.
    pub h: ScalarField,
    /// Profile `H(x, y)` of the generalized families.
    pub big_h: Option<ScalarField>,
    pub l2: ScalarField,
    pub n2: ScalarField,
    pub domain: Domain,
    pub options: BuildOptions,
}

impl SurfaceSpec {
    /// Calabi type data with `(l₂, n₂)` supplied.
    pub fn calabi(alpha: AlphaProfile, h: ScalarField, l2: ScalarField, n2: ScalarField, domain: Domain) -> SurfaceSpec {
        SurfaceSpec {
            family: Family::Calabi,
            a: None,
            alpha: Some(alpha),
            h,
            big_h: None,
            l2,
            n2,
            domain,
            options: BuildOptions::default(),
        }
    }

    /// Generalized family data with `(l₂, n₂)` taken from the gradient of
    /// `ln H`.
    pub fn generalized(
        family: Family,
        a: f64,
        h: ScalarField,
        big_h: ScalarField,
        domain: Domain,
    ) -> Result<SurfaceSpec, SurfaceError> {
        let (l2, n2) = gradient_potentials(family, a, &big_h)?;
        Ok(SurfaceSpec {
            family,
            a: Some(a),
            alpha: None,
            h,
            big_h: Some(big_h),
            l2,
            n2,
            domain,
            options: BuildOptions::default(),
        })
    }

    pub fn with_options(mut self, options: BuildOptions) -> SurfaceSpec {
        self.options = options;
        self
    }

    pub fn with_potentials(mut self, l2: ScalarField, n2: ScalarField) -> SurfaceSpec {
        self.l2 = l2;
        self.n2 = n2;
        self
    }

    pub fn has_grid_leaf(&self) -> bool {
        self.h.has_grid_leaf() || self.big_h.as_ref().is_some_and(|h| h.has_grid_leaf())
    }
}

/// `(l₂, n₂)` prescribed by the gradient of `ln H` for a generalized family.
pub fn gradient_potentials(
    family: Family,
    a: f64,
    big_h: &ScalarField,
) -> Result<(ScalarField, ScalarField), SurfaceError> {
    if family == Family::Calabi {
        return Err(SurfaceError::Usage("the calabi family has no H profile".into()));
    }
    if a == 0.0 || !a.is_finite() {
        return Err(SurfaceError::Usage(format!("parameter a must be finite and nonzero, got {a}")));
    }
    let s = family.gradient_sign() / (2.0 * a);
    let ln_h = big_h.ln();
    Ok((-s * &ln_h.partial(Coord::Y)?, s * &ln_h.partial(Coord::X)?))
}

/// Identification of a model for reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceId {
    pub family: Family,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    pub alpha: String,
    pub h: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_h: Option<String>,
    pub grid_backed: bool,
    pub flip_potentials: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
}

/// A built surface.
#[derive(Clone, Debug)]
pub struct SurfaceModel {
    id: SurfaceId,
    kind: AlphaKind,
    frame: FramePair,
    alpha: ScalarField,
    beta: ScalarField,
    primitive: ScalarField,
    f: ScalarField,
    h: ScalarField,
    big_h: Option<ScalarField>,
    omega: KForm,
    omega_bar: KForm,
    lee: KForm,
}

impl SurfaceModel {
    pub fn id(&self) -> &SurfaceId {
        &self.id
    }

    pub fn family(&self) -> Family {
        self.id.family
    }

    pub fn a(&self) -> Option<f64> {
        self.id.a
    }

    pub fn alpha_kind(&self) -> AlphaKind {
        self.kind
    }

    pub fn frame(&self) -> &FramePair {
        &self.frame
    }

    pub fn domain(&self) -> &Domain {
        self.frame.domain()
    }

    pub fn alpha(&self) -> &ScalarField {
        &self.alpha
    }

    /// `E₃ = (1/β)∂t` for the generalized families, `E₃ = β∂t` for Calabi.
    pub fn beta(&self) -> &ScalarField {
        &self.beta
    }

    /// `A` with `A′ = α`.
    pub fn primitive(&self) -> &ScalarField {
        &self.primitive
    }

    /// Conformal factor `f` of `θ₁ = f dx`, `θ₂ = f dy`.
    pub fn conformal_factor(&self) -> &ScalarField {
        &self.f
    }

    pub fn h(&self) -> &ScalarField {
        &self.h
    }

    pub fn big_h(&self) -> Option<&ScalarField> {
        self.big_h.as_ref()
    }

    /// `Ω = θ₁∧θ₂ + θ₃∧θ₄`
    pub fn omega(&self) -> &KForm {
        &self.omega
    }

    /// `Ω̄ = θ₁∧θ₂ − θ₃∧θ₄`
    pub fn omega_bar(&self) -> &KForm {
        &self.omega_bar
    }

    /// Lee form `θ = −αθ₄` of `(g, J)`.
    pub fn lee_form(&self) -> &KForm {
        &self.lee
    }

    pub fn j(&self) -> ComplexStructure {
        ComplexStructure::standard()
    }

    pub fn j_bar(&self) -> ComplexStructure {
        ComplexStructure::opposite()
    }

    pub fn is_grid_backed(&self) -> bool {
        self.id.grid_backed
    }

    /// Largest spacing of the grids behind `h` and `H`.
    pub fn grid_spacing(&self) -> Option<f64> {
        [Some(&self.h), self.big_h.as_ref()]
            .into_iter()
            .flatten()
            .filter_map(ScalarField::grid_spacing)
            .reduce(f64::max)
    }
}

/// `θ₁ = f dx, θ₂ = f dy, θ₃ = b dt − L dx − N dy, θ₄ = dz − P dx − Q dy`
/// with its dual frame.
struct Coefficients {
    f: ScalarField,
    b: ScalarField,
    l: ScalarField,
    n: ScalarField,
    p: ScalarField,
    q: ScalarField,
}

impl Coefficients {
    fn frame(&self, domain: Domain) -> FramePair {
        let zero = ScalarField::zero;
        let one = ScalarField::one;
        let Coefficients { f, b, l, n, p, q } = self;
        let coframe = [
            KForm::one_form([f.clone(), zero(), zero(), zero()]),
            KForm::one_form([zero(), f.clone(), zero(), zero()]),
            KForm::one_form([-l, -n, zero(), b.clone()]),
            KForm::one_form([-p, -q, one(), zero()]),
        ];
        let inv_f = one() / f;
        let bf = b * f;
        let frame = [
            VectorField([inv_f.clone(), zero(), p * &inv_f, l / &bf]),
            VectorField([zero(), inv_f.clone(), q * &inv_f, n / &bf]),
            VectorField([zero(), zero(), zero(), one() / b]),
            VectorField::coordinate(Coord::Z),
        ];
        FramePair::new(coframe, frame, domain)
    }
}

fn check_domain(domain: &Domain) -> Result<(), SurfaceError> {
    for c in Coord::ALL {
        let (lo, hi) = domain.range(c);
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(SurfaceError::Usage(format!("{c}-range ({lo}, {hi}) is not a finite interval")));
        }
    }
    Ok(())
}

/// `α`, `β` and `f/h` must be finite, nonzero and of one sign across the
/// z-range.
fn check_fiber(domain: &Domain, fields: &[(&str, &ScalarField)]) -> Result<(), SurfaceError> {
    let (lo, hi) = domain.z;
    let n = 257;
    for (name, field) in fields {
        let mut sign = 0.0;
        for k in 0..n {
            let z = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let v = field.eval(&ChartPoint::new(0.0, 0.0, z, 0.0))?;
            if !v.is_finite() || v.abs() < 1e-12 {
                return Err(SurfaceError::Domain(format!("{name} vanishes or is singular at z = {z} ({v})")));
            }
            if sign != 0.0 && v.signum() != sign {
                return Err(SurfaceError::Domain(format!("{name} changes sign in the z-range near z = {z}")));
            }
            sign = v.signum();
        }
    }
    Ok(())
}

fn check_points(domain: &Domain) -> Vec<ChartPoint> {
    let mut pts = xy_lattice(domain, 17);
    pts.extend(domain.sample(64, 0xb1d));
    pts
}

fn reject(reason: &str, tol: f64, (residual, point): (f64, [f64; 4])) -> Result<(), SurfaceError> {
    if residual <= tol {
        Ok(())
    } else {
        Err(SurfaceError::Rejected {
            reason: reason.to_string(),
            residual,
            point,
        })
    }
}

/// Calabi type surface: `θ₁ = f dx, θ₂ = f dy` with `f = e^{−A/2}h`,
/// `θ₃ = (1/β)(dt − l₂dx − n₂dy)`, `θ₄ = dz`, `β = e^A/α`.
pub fn build_calabi(spec: &SurfaceSpec) -> Result<SurfaceModel, SurfaceError> {
    if spec.family != Family::Calabi {
        return Err(SurfaceError::Usage(format!("build_calabi called with family {}", spec.family)));
    }
    let profile = spec
        .alpha
        .as_ref()
        .ok_or_else(|| SurfaceError::Usage("the calabi family needs an α profile".into()))?;
    let domain = spec.domain;
    check_domain(&domain)?;
    check_positive("h", &spec.h, &domain)?;
    let beta = profile.calabi_beta();
    check_fiber(&domain, &[("α", profile.alpha()), ("β", &beta)])?;

    let tol = spec.options.tolerance;
    let defect = spec.n2.partial(Coord::X)? - spec.l2.partial(Coord::Y)? - spec.h.square();
    reject(
        "d(l₂dx + n₂dy) differs from h² dx∧dy",
        tol,
        worst(&defect, &check_points(&domain))?,
    )?;

    let (mut l2, mut n2) = (spec.l2.clone(), spec.n2.clone());
    if spec.options.flip_potentials {
        (l2, n2) = (-l2, -n2);
    }
    let inv_beta = ScalarField::one() / &beta;
    let mut c = Coefficients {
        f: (-0.5 * profile.primitive()).exp() * &spec.h,
        b: inv_beta.clone(),
        l: &l2 * &inv_beta,
        n: &n2 * &inv_beta,
        p: ScalarField::zero(),
        q: ScalarField::zero(),
    };
    match spec.options.mutation {
        Some(Mutation::NegateDt) => c.b = -&c.b,
        Some(Mutation::NegateDx) => c.l = -&c.l,
        Some(Mutation::NegateDy) => c.n = -&c.n,
        None => {}
    }
    Ok(finish(spec, profile, beta, c))
}

/// `tan`, `coth` and `tanh` families.
fn build_generalized(spec: &SurfaceSpec, family: Family) -> Result<SurfaceModel, SurfaceError> {
    if spec.family != family {
        return Err(SurfaceError::Usage(format!(
            "builder for {family} called with family {}",
            spec.family
        )));
    }
    let a = spec
        .a
        .ok_or_else(|| SurfaceError::Usage(format!("family {family} needs the parameter a")))?;
    let big_h = spec
        .big_h
        .as_ref()
        .ok_or_else(|| SurfaceError::Usage(format!("family {family} needs the profile H")))?;
    let profile = family.profile(a)?;
    let domain = spec.domain;
    check_domain(&domain)?;
    check_positive("h", &spec.h, &domain)?;
    check_positive("H", big_h, &domain)?;

    let z = ScalarField::z();
    let az = a * &z;
    let two_az = 2.0 * &az;
    let two_at = 2.0 * a * &ScalarField::t();
    let (beta, fiber, warp) = match family {
        Family::Tan => (two_az.sin(), az.cos(), two_az.cos()),
        Family::Coth => (two_az.sinh(), az.sinh(), two_az.cosh()),
        _ => (two_az.sinh(), az.cosh(), two_az.cosh()),
    };
    check_fiber(&domain, &[("α", profile.alpha()), ("β", &beta), ("f/h", &fiber)])?;

    let tol = spec.options.tolerance;
    let (c1, c2) = family.pde_coefficients(a).expect("generalized family");
    let ln_h = big_h.ln();
    let laplacian = ln_h.partial(Coord::X)?.partial(Coord::X)? + ln_h.partial(Coord::Y)?.partial(Coord::Y)?;
    let pde = laplacian - c1 * &spec.h.square() - c2 * &big_h.square();
    reject(
        &format!("H does not satisfy Δ ln H = {c1}h² + {c2}H²"),
        tol,
        worst(&pde, &xy_lattice(&domain, 17))?,
    )?;
    let (l2_expected, n2_expected) = gradient_potentials(family, a, big_h)?;
    let pts = check_points(&domain);
    reject("l₂ does not match the gradient of ln H", tol, worst(&(&spec.l2 - &l2_expected), &pts)?)?;
    reject("n₂ does not match the gradient of ln H", tol, worst(&(&spec.n2 - &n2_expected), &pts)?)?;

    let (mut l2, mut n2) = (spec.l2.clone(), spec.n2.clone());
    if spec.options.flip_potentials {
        (l2, n2) = (-l2, -n2);
    }
    let (s, c) = (two_at.sin(), two_at.cos());
    // H-terms of the dx and dy coefficients of θ₃, and (P, Q) of θ₄
    let (hx, hy, p, q) = match family {
        Family::Coth => (-(&s * &warp), &c * &warp, c.clone(), s.clone()),
        _ => (&c * &warp, -(&s * &warp), s.clone(), c.clone()),
    };
    let (mut hx, mut hy) = (hx * big_h, hy * big_h);
    let mut b = beta.clone();
    match spec.options.mutation {
        Some(Mutation::NegateDt) => b = -&b,
        Some(Mutation::NegateDx) => hx = -&hx,
        Some(Mutation::NegateDy) => hy = -&hy,
        None => {}
    }
    let coeffs = Coefficients {
        f: &spec.h * &fiber,
        l: hx + &beta * &l2,
        n: hy + &beta * &n2,
        b,
        p: p * big_h,
        q: q * big_h,
    };
    Ok(finish(spec, &profile, beta, coeffs))
}

fn finish(spec: &SurfaceSpec, profile: &AlphaProfile, beta: ScalarField, c: Coefficients) -> SurfaceModel {
    let frame = c.frame(spec.domain);
    let t12 = frame.basis_form(0b0011).clone();
    let t34 = frame.basis_form(0b1100).clone();
    let lee = frame.theta(3).scale(&-profile.alpha());
    SurfaceModel {
        id: SurfaceId {
            family: spec.family,
            a: spec.a,
            alpha: profile.alpha().to_string(),
            h: spec.h.to_string(),
            big_h: spec.big_h.as_ref().map(|h| h.to_string()),
            grid_backed: spec.has_grid_leaf(),
            flip_potentials: spec.options.flip_potentials,
            mutation: spec.options.mutation,
        },
        kind: profile.kind(),
        alpha: profile.alpha().clone(),
        beta,
        primitive: profile.primitive().clone(),
        f: c.f.clone(),
        h: spec.h.clone(),
        big_h: spec.big_h.clone(),
        omega: &t12 + &t34,
        omega_bar: &t12 - &t34,
        lee,
        frame,
    }
}

/// `θ₃ = sin 2az dt − (cos 2at cos 2az H + sin 2az l₂)dx
/// − (−sin 2at cos 2az H + sin 2az n₂)dy`, `θ₄ = dz − sin 2at H dx − cos 2at H dy`,
/// `f = h cos az`.
pub fn build_tan(spec: &SurfaceSpec) -> Result<SurfaceModel, SurfaceError> {
    build_generalized(spec, Family::Tan)
}

/// `θ₃ = sinh 2az dt − (−sin 2at cosh 2az H + sinh 2az l₂)dx
/// − (cos 2at cosh 2az H + sinh 2az n₂)dy`, `θ₄ = dz − cos 2at H dx − sin 2at H dy`,
/// `f = h sinh az`.
pub fn build_coth(spec: &SurfaceSpec) -> Result<SurfaceModel, SurfaceError> {
    build_generalized(spec, Family::Coth)
}

/// `θ₃ = sinh 2az dt − (cos 2at cosh 2az H + sinh 2az l₂)dx
/// − (−sin 2at cosh 2az H + sinh 2az n₂)dy`, `θ₄ = dz − sin 2at H dx − cos 2at H dy`,
/// `f = h cosh az`.
pub fn build_tanh(spec: &SurfaceSpec) -> Result<SurfaceModel, SurfaceError> {
    build_generalized(spec, Family::Tanh)
}

/// Dispatch on `spec.family`.
pub fn build(spec: &SurfaceSpec) -> Result<SurfaceModel, SurfaceError> {
    match spec.family {
        Family::Calabi => build_calabi(spec),
        f => build_generalized(spec, f),
    }
}

/// `h = √((Δ ln H − c₂H²)/c₁)`, making `(h, H)` an exact solution pair of the
/// family's equation; positivity is checked on a lattice over `domain`.
#[allow(non_snake_case)]
pub fn manufacture_h_from_H(
    big_h: &ScalarField,
    a: f64,
    family: Family,
    domain: &Domain,
) -> Result<ScalarField, SurfaceError> {
    let (c1, c2) = family
        .pde_coefficients(a)
        .ok_or_else(|| SurfaceError::Usage("the calabi family has no H equation".into()))?;
    if a == 0.0 || !a.is_finite() {
        return Err(SurfaceError::Usage(format!("parameter a must be finite and nonzero, got {a}")));
    }
    let ln_h = big_h.ln();
    let laplacian = ln_h.partial(Coord::X)?.partial(Coord::X)? + ln_h.partial(Coord::Y)?.partial(Coord::Y)?;
    let h_sq = (laplacian - c2 * &big_h.square()) / c1;
    for p in xy_lattice(domain, 33) {
        let v = h_sq.eval(&p)?;
        if !(v > 0.0) {
            return Err(SurfaceError::Infeasible {
                value: v,
                point: [p.coords[0], p.coords[1]],
            });
        }
    }
    Ok(h_sq.sqrt())
}
