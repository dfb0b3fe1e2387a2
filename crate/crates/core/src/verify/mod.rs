//! Residual checks of the Hermitian and curvature identities on a built
//! surface.
//!
//! Every check evaluates its identity at sample points, in the orthonormal
//! frame, and reports the largest absolute residual. A check passes exactly
//! when that residual is within its tolerance. Two checks (`lck` on the
//! generalized families and `semisym_criterion` off the `−2/z` profile)
//! assert that a quantity is *not* zero; they report the reciprocal of the
//! witness as the residual and the reciprocal of the threshold as the
//! tolerance, so the same rule applies.

mod checks;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cartan::{curvature, solve_connection, ConnectionForms, Curvature};
use crate::scalar::{ChartPoint, FieldError, ScalarField};
use crate::surfaces::{Family, SurfaceId, SurfaceModel};

pub use checks::{
    check_brackets, check_connection_lemmas, check_dtheta, check_fiber_curvature, check_integrability,
    check_kahler, check_killing, check_lck, check_lee, check_nabla_omega, check_qch_quartic, check_ricci_form,
    check_ricci_j_invariant, check_semisym, check_structure_equations, check_tau, check_weyl_degenerate,
};

/// Names of all checks, in report order.
pub const CHECK_NAMES: [&str; 17] = [
    "kahler",
    "lee",
    "nabla_omega",
    "brackets_22",
    "structure_eqs_23",
    "connection_lemmas",
    "dtheta",
    "ricci_J_invariant",
    "ricci_form_calabi",
    "tau_calabi",
    "integrability",
    "weyl_degenerate",
    "qch_quartic",
    "fiber_curvature",
    "lck",
    "killing_calabi",
    "semisym_criterion",
];

/// One sub-identity of a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<Component>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    /// Components whose residual exceeds the tolerance.
    pub fn failing_components(&self) -> Vec<&str> {
        self.components
            .iter()
            .filter(|c| !(c.max_residual <= self.tolerance))
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// Tolerance relaxation applied to grid-backed surfaces: `tolerance =
/// max(tol, constant · spacing²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRelaxation {
    pub spacing: f64,
    pub constant: f64,
    pub tolerance: f64,
    /// `max_residual / spacing²` over the checks 1–11 that could be
    /// evaluated.
    pub observed_constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub surface: SurfaceId,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_relaxation: Option<GridRelaxation>,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failing(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A surface with its connection and curvature, computed once on demand.
pub struct Verifier<'m> {
    model: &'m SurfaceModel,
    conn: OnceLock<Result<ConnectionForms, FieldError>>,
    curv: OnceLock<Result<Curvature, FieldError>>,
    /// `E_i α`
    d_alpha: OnceLock<Result<[ScalarField; 4], FieldError>>,
}

impl<'m> Verifier<'m> {
    pub fn new(model: &'m SurfaceModel) -> Verifier<'m> {
        Verifier {
            model,
            conn: OnceLock::new(),
            curv: OnceLock::new(),
            d_alpha: OnceLock::new(),
        }
    }

    pub fn model(&self) -> &SurfaceModel {
        self.model
    }

    pub fn connection(&self) -> Result<&ConnectionForms, FieldError> {
        self.conn
            .get_or_init(|| solve_connection(self.model.frame()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn curvature(&self) -> Result<&Curvature, FieldError> {
        self.curv
            .get_or_init(|| curvature(self.connection()?))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `E_i α` for `i = 1..4` (0-based).
    pub fn alpha_derivatives(&self) -> Result<&[ScalarField; 4], FieldError> {
        self.d_alpha
            .get_or_init(|| {
                let fr = self.model.frame();
                let mut out: [ScalarField; 4] = std::array::from_fn(|_| ScalarField::zero());
                for (i, o) in out.iter_mut().enumerate() {
                    *o = fr.e(i).apply(self.model.alpha())?;
                }
                Ok(out)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Which checks apply to the model's family.
    pub fn applicable(&self) -> Vec<&'static str> {
        let calabi = self.model.family() == Family::Calabi;
        CHECK_NAMES
            .iter()
            .copied()
            .filter(|n| match *n {
                "ricci_form_calabi" | "tau_calabi" | "killing_calabi" => calabi,
                "fiber_curvature" => !calabi,
                _ => true,
            })
            .collect()
    }

    /// Run one check by name.
    pub fn run(&self, name: &str, points: &[ChartPoint], seed: u64, tol: f64) -> Option<CheckResult> {
        let r = match name {
            "kahler" => check_kahler(self, points, tol),
            "lee" => check_lee(self, points, tol),
            "nabla_omega" => check_nabla_omega(self, points, tol),
            "brackets_22" => check_brackets(self, points, tol),
            "structure_eqs_23" => check_structure_equations(self, points, tol),
            "connection_lemmas" => check_connection_lemmas(self, points, tol),
            "dtheta" => check_dtheta(self, points, tol),
            "ricci_J_invariant" => check_ricci_j_invariant(self, points, tol),
            "ricci_form_calabi" => check_ricci_form(self, points, tol),
            "tau_calabi" => check_tau(self, points, tol),
            "integrability" => check_integrability(self, points, tol),
            "weyl_degenerate" => check_weyl_degenerate(self, points, tol),
            "qch_quartic" => check_qch_quartic(self, points, seed, tol),
            "fiber_curvature" => check_fiber_curvature(self, points, tol),
            "lck" => check_lck(self, points, tol),
            "killing_calabi" => check_killing(self, points, tol),
            "semisym_criterion" => check_semisym(self, points, tol),
            _ => return None,
        };
        Some(CheckResult { seed, ..r })
    }
}

/// Checks that report a reciprocal witness.
const INVERTED: [&str; 2] = ["lck", "semisym_criterion"];

/// Default constant `C` in the grid relaxation `C · spacing²`.
pub const GRID_CONSTANT: f64 = 100.0;

/// Run every applicable check at `samples` points drawn from the model's
/// domain with `seed`.
pub fn run_suite(model: &SurfaceModel, samples: usize, seed: u64, tol: f64) -> VerificationReport {
    run_suite_with(model, samples, seed, tol, GRID_CONSTANT)
}

/// [`run_suite`] with an explicit grid relaxation constant.
pub fn run_suite_with(
    model: &SurfaceModel,
    samples: usize,
    seed: u64,
    tol: f64,
    grid_constant: f64,
) -> VerificationReport {
    let samples = samples.max(1);
    let points = model.domain().sample(samples, seed);
    let v = Verifier::new(model);
    let spacing = model.grid_spacing();
    let effective = match spacing {
        Some(s) => tol.max(grid_constant * s * s),
        None => tol,
    };
    let checks: Vec<CheckResult> = v
        .applicable()
        .into_iter()
        .map(|name| {
            // the nonzero thresholds are not relaxed
            let t = if INVERTED.contains(&name) { tol } else { effective };
            v.run(name, &points, seed, t).expect("known check")
        })
        .collect();
    let grid_relaxation = spacing.map(|s| {
        let observed = checks[..]
            .iter()
            .take_while(|c| c.name != "weyl_degenerate")
            .filter(|c| c.max_residual.is_finite() && !INVERTED.contains(&c.name.as_str()))
            .map(|c| c.max_residual)
            .fold(0.0, f64::max);
        GridRelaxation {
            spacing: s,
            constant: grid_constant,
            tolerance: effective,
            observed_constant: observed / (s * s),
        }
    });
    VerificationReport {
        surface: model.id().clone(),
        samples,
        seed,
        tolerance: tol,
        grid_relaxation,
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}
