use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartan::{covariant_derivative_2form, CartanError, ComplexStructure, CurvatureData};
use crate::exterior::{codifferential, lie_bracket, FrameAt, KForm, Mask, NumForm};
use crate::scalar::{ChartPoint, Coord, Evaluator, FieldError, ScalarField};
use crate::surfaces::{AlphaKind, Family};

use super::{CheckResult, Component, Verifier};

const T12: Mask = 0b0011;
const T13: Mask = 0b0101;
const T14: Mask = 0b1001;
const T23: Mask = 0b0110;
const T24: Mask = 0b1010;
const T34: Mask = 0b1100;

/// Witness factor for the checks that require a quantity to be nonzero.
const NONZERO_FACTOR: f64 = 1e3;

struct Fail(String);

impl From<FieldError> for Fail {
    fn from(e: FieldError) -> Self {
        Fail(e.to_string())
    }
}

impl From<CartanError> for Fail {
    fn from(e: CartanError) -> Self {
        Fail(e.to_string())
    }
}

#[derive(Default)]
struct Acc {
    comps: Vec<Component>,
    detail: Option<String>,
    tolerance: Option<f64>,
}

impl Acc {
    fn put(&mut self, name: &str, v: f64) {
        let v = v.abs();
        match self.comps.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                if !(v <= c.max_residual) {
                    c.max_residual = v;
                }
            }
            None => self.comps.push(Component {
                name: name.to_string(),
                max_residual: v,
            }),
        }
    }
}

fn finish(name: &str, samples: usize, tol: f64, r: Result<Acc, Fail>) -> CheckResult {
    match r {
        Ok(acc) => {
            let tolerance = acc.tolerance.unwrap_or(tol);
            let max_residual = acc
                .comps
                .iter()
                .map(|c| c.max_residual)
                .fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) });
            CheckResult {
                name: name.to_string(),
                max_residual,
                tolerance,
                pass: max_residual <= tolerance,
                samples,
                seed: 0,
                components: acc.comps,
                detail: acc.detail,
            }
        }
        Err(Fail(msg)) => CheckResult {
            name: name.to_string(),
            max_residual: f64::INFINITY,
            tolerance: tol,
            pass: false,
            samples,
            seed: 0,
            components: Vec::new(),
            detail: Some(msg),
        },
    }
}

fn not_applicable(name: &str, samples: usize, tol: f64, why: &str) -> CheckResult {
    finish(name, samples, tol, Err(Fail(format!("not applicable: {why}"))))
}

fn frame_at<'p>(v: &Verifier, p: &'p ChartPoint) -> Result<(Evaluator<'p>, FrameAt), Fail> {
    let mut ev = Evaluator::new(p);
    let at = v.model().frame().at(&mut ev)?;
    let det = at.coframe_det();
    if !(det.abs() > 1e-300) {
        return Err(Fail(format!("coframe degenerate at {:?} (determinant {det:e})", p.coords)));
    }
    Ok((ev, at))
}

fn form_in_frame(form: &KForm, ev: &mut Evaluator, at: &FrameAt) -> Result<NumForm, Fail> {
    Ok(at.to_frame(&form.eval(ev)?))
}

fn num2(terms: &[(Mask, f64)]) -> NumForm {
    let mut out = NumForm::zero(2);
    for &(m, c) in terms {
        out.coeffs[m as usize] += c;
    }
    out
}

/// `(α, [E_i ln α])` at the point of `ev`.
fn alpha_data(v: &Verifier, ev: &mut Evaluator) -> Result<(f64, [f64; 4]), Fail> {
    let alpha = ev.eval(v.model().alpha())?;
    let d = v.alpha_derivatives()?;
    let mut e = [0.0; 4];
    for i in 0..4 {
        e[i] = ev.eval(&d[i])? / alpha;
    }
    Ok((alpha, e))
}

fn curvature_at(v: &Verifier, ev: &mut Evaluator) -> Result<CurvatureData, Fail> {
    Ok(v.curvature()?.at_with(ev)?)
}

/// `dΩ̄ = 0`
pub fn check_kahler(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let d = v.model().omega_bar().ext_d()?;
        for p in points {
            let (mut ev, at) = frame_at(v, p)?;
            acc.put("d_omega_bar", form_in_frame(&d, &mut ev, &at)?.max_abs());
        }
        Ok(acc)
    })();
    finish("kahler", points.len(), tol, r)
}

/// `dΩ = 2θ∧Ω` and `δΩ = −2αθ₃` with `θ = −αθ₄`.
pub fn check_lee(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let m = v.model();
        let mut acc = Acc::default();
        let omega = m.omega();
        let d_res = &omega.ext_d()? - &m.lee_form().wedge(omega).scale(&ScalarField::constant(2.0));
        let delta = codifferential(omega, m.frame())?;
        let delta_res = &delta + &m.frame().theta(2).scale(&(2.0 * m.alpha()));
        for p in points {
            let (mut ev, at) = frame_at(v, p)?;
            acc.put("d_omega", form_in_frame(&d_res, &mut ev, &at)?.max_abs());
            acc.put("delta_omega", form_in_frame(&delta_res, &mut ev, &at)?.max_abs());
        }
        Ok(acc)
    })();
    finish("lee", points.len(), tol, r)
}

/// `∇Ω = α(θ₁⊗Φ + θ₂⊗Ψ)` and `|∇Ω|² = 8α²`.
pub fn check_nabla_omega(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let cov = covariant_derivative_2form(v.model().omega(), v.connection()?)?;
        // Φ = θ13 − θ24, Ψ = θ14 + θ23 as antisymmetric matrices
        let mut phi = [[0.0; 4]; 4];
        let mut psi = [[0.0; 4]; 4];
        for (m, i, j, s) in [(0, 0, 2, 1.0), (0, 1, 3, -1.0), (1, 0, 3, 1.0), (1, 1, 2, 1.0)] {
            let t = if m == 0 { &mut phi } else { &mut psi };
            t[i][j] = s;
            t[j][i] = -s;
        }
        for p in points {
            let mut ev = Evaluator::new(p);
            let alpha = ev.eval(v.model().alpha())?;
            let n = cov.at_with(&mut ev)?;
            let mut worst = 0.0f64;
            let mut norm = 0.0;
            for (k, nk) in n.iter().enumerate() {
                for i in 0..4 {
                    for j in 0..4 {
                        let expected = match k {
                            0 => alpha * phi[i][j],
                            1 => alpha * psi[i][j],
                            _ => 0.0,
                        };
                        worst = worst.max((nk[i][j] - expected).abs());
                        norm += nk[i][j] * nk[i][j];
                    }
                }
            }
            acc.put("nabla_omega", worst);
            acc.put("norm_squared", norm - 8.0 * alpha * alpha);
        }
        Ok(acc)
    })();
    finish("nabla_omega", points.len(), tol, r)
}

/// The six frame brackets, computed as Lie brackets of the frame fields.
pub fn check_brackets(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let fr = v.model().frame();
        let conn = v.connection()?;
        let pairs = [(0, 3), (1, 3), (0, 2), (1, 2), (2, 3), (0, 1)];
        let mut comps = Vec::new();
        for &(i, j) in &pairs {
            let b = lie_bracket(fr.e(i), fr.e(j))?;
            comps.push([0, 1, 2, 3].map(|k| b.pair(fr.theta(k))));
        }
        for p in points {
            let mut ev = Evaluator::new(p);
            let (alpha, e) = alpha_data(v, &mut ev)?;
            let g112 = ev.eval(conn.gamma(0, 0, 1))?;
            let g221 = ev.eval(conn.gamma(1, 1, 0))?;
            let expected = [
                [-alpha / 2.0, 0.0, e[1], 0.0],
                [0.0, -alpha / 2.0, -e[0], 0.0],
                [0.0, 0.0, 0.0, -e[1]],
                [0.0, 0.0, 0.0, e[0]],
                [0.0, 0.0, -(-e[3] + alpha), 0.0],
                [g112, -g221, alpha, 0.0],
            ];
            for (n, &(i, j)) in pairs.iter().enumerate() {
                let mut worst = 0.0f64;
                for k in 0..4 {
                    worst = worst.max((ev.eval(&comps[n][k])? - expected[n][k]).abs());
                }
                acc.put(&format!("bracket_E{}E{}", i + 1, j + 1), worst);
            }
        }
        Ok(acc)
    })();
    finish("brackets_22", points.len(), tol, r)
}

/// The four first structure equations in terms of `α` and its derivatives.
pub fn check_structure_equations(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let fr = v.model().frame();
        let conn = v.connection()?;
        let d: Vec<KForm> = (0..4).map(|i| fr.theta(i).ext_d()).collect::<Result<_, _>>()?;
        for p in points {
            let (mut ev, at) = frame_at(v, p)?;
            let (alpha, e) = alpha_data(v, &mut ev)?;
            let g211 = ev.eval(conn.gamma(1, 0, 0))?;
            let g122 = ev.eval(conn.gamma(0, 1, 1))?;
            let expected = [
                num2(&[(T12, g211), (T14, alpha / 2.0)]),
                num2(&[(T12, -g122), (T24, alpha / 2.0)]),
                num2(&[(T12, -alpha), (T14, -e[1]), (T24, e[0]), (T34, -e[3] + alpha)]),
                num2(&[(T13, e[1]), (T23, -e[0])]),
            ];
            for i in 0..4 {
                let got = form_in_frame(&d[i], &mut ev, &at)?;
                acc.put(&format!("structure_eq_dtheta{}", i + 1), got.sub(&expected[i]).max_abs());
            }
        }
        Ok(acc)
    })();
    finish("structure_eqs_23", points.len(), tol, r)
}

/// Christoffel symbol identities of the frame.
pub fn check_connection_lemmas(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let conn = v.connection()?;
        for p in points {
            let mut ev = Evaluator::new(p);
            let (alpha, e) = alpha_data(v, &mut ev)?;
            let g = conn.gamma_at(&mut ev)?;
            // Γ^i_{kj} (1-based in the names) is g[i-1][k-1][j-1]
            let gm = |i: usize, k: usize, j: usize| g[i - 1][k - 1][j - 1];
            let max = |vals: &[f64]| vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            acc.put("gamma3_11_22", max(&[gm(3, 1, 1) - e[2], gm(3, 2, 2) - e[2]]));
            acc.put(
                "gamma3_44_gamma4_21_12",
                max(&[gm(3, 4, 4) + e[2], gm(4, 2, 1) + e[2], -gm(4, 1, 2) + e[2]]),
            );
            acc.put("gamma_symmetries", max(&[gm(3, 2, 1) + gm(3, 1, 2), gm(4, 1, 1) - gm(4, 2, 2)]));
            acc.put("gamma3_21_gamma4_22", -gm(3, 2, 1) + gm(4, 2, 2) - alpha);
            acc.put("gamma4_33", gm(4, 3, 3) - (-e[3] + alpha));
            acc.put("gamma4_13_23", max(&[gm(4, 1, 3) + e[1], gm(4, 2, 3) - e[0]]));
            acc.put("e3_ln_alpha", e[2]);
            acc.put("e4_geodesic", max(&[gm(1, 4, 4), gm(2, 4, 4), gm(3, 4, 4), gm(4, 4, 4)]));
            let half = alpha / 2.0;
            acc.put(
                "half_alpha_values",
                max(&[-gm(3, 2, 1) - half, gm(3, 1, 2) - half, gm(4, 1, 1) - half, gm(4, 2, 2) - half]),
            );
        }
        Ok(acc)
    })();
    finish("connection_lemmas", points.len(), tol, r)
}

/// `dθ = −E₂α Φ̄ − E₁α Ψ̄` with `Φ̄ = θ13 + θ24`, `Ψ̄ = θ14 − θ23`; `dθ` is
/// anti-self-dual.
pub fn check_dtheta(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let d = v.model().lee_form().ext_d()?;
        let da = v.alpha_derivatives()?;
        for p in points {
            let (mut ev, at) = frame_at(v, p)?;
            let (e1, e2) = (ev.eval(&da[0])?, ev.eval(&da[1])?);
            let got = form_in_frame(&d, &mut ev, &at)?;
            let expected = num2(&[(T13, -e2), (T24, -e2), (T14, -e1), (T23, e1)]);
            acc.put("dtheta_formula", got.sub(&expected).max_abs());
            acc.put("dtheta_anti_self_dual", got.add(&got.star()).max_abs());
        }
        Ok(acc)
    })();
    finish("dtheta", points.len(), tol, r)
}

fn invariance_defect(ric: &[[f64; 4]; 4], j: &ComplexStructure) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..4 {
        for b in 0..4 {
            let mut v = 0.0;
            for c in 0..4 {
                for d in 0..4 {
                    v += j.images[a][c] * j.images[b][d] * ric[c][d];
                }
            }
            worst = worst.max((v - ric[a][b]).abs());
        }
    }
    worst
}

/// `Ric(JX, JY) = Ric(X, Y)` on the frame.
pub fn check_ricci_j_invariant(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let (j, jbar) = (v.model().j(), v.model().j_bar());
        for p in points {
            let cd = curvature_at(v, &mut Evaluator::new(p))?;
            acc.put("J", invariance_defect(&cd.ricci, &j));
            acc.put("J_bar", invariance_defect(&cd.ricci, &jbar));
        }
        Ok(acc)
    })();
    finish("ricci_J_invariant", points.len(), tol, r)
}

/// `(Δ ln h) e^A / h²`, `α′`, `β′/β`, `β″/β` for the Calabi curvature formulas.
struct CalabiTerms {
    lap: ScalarField,
    alpha1: ScalarField,
    beta1: ScalarField,
    beta2: ScalarField,
}

fn calabi_terms(v: &Verifier) -> Result<CalabiTerms, Fail> {
    let m = v.model();
    let ln_h = m.h().ln();
    let lap = ln_h.partial(Coord::X)?.partial(Coord::X)? + ln_h.partial(Coord::Y)?.partial(Coord::Y)?;
    let beta = m.beta();
    let b1 = beta.partial(Coord::Z)?;
    let b2 = b1.partial(Coord::Z)?;
    Ok(CalabiTerms {
        lap: lap * m.primitive().exp() / m.h().square(),
        alpha1: m.alpha().partial(Coord::Z)?,
        beta1: b1 / beta,
        beta2: b2 / beta,
    })
}

/// Ricci form `ρ(X, Y) = Ric(J̄X, Y)` against
/// `(−(Δ ln h)e^A/h² − 3α²/2 + α′) θ₁∧θ₂ + (α′/2 + β″/β − 2(β′/β)² − αβ′/2β) θ₄∧θ₃`.
pub fn check_ricci_form(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    if v.model().family() != Family::Calabi {
        return not_applicable("ricci_form_calabi", points.len(), tol, "calabi family only");
    }
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let terms = calabi_terms(v)?;
        let jbar = v.model().j_bar();
        for p in points {
            let mut ev = Evaluator::new(p);
            let cd = curvature_at(v, &mut ev)?;
            let alpha = ev.eval(v.model().alpha())?;
            let (lap, a1) = (ev.eval(&terms.lap)?, ev.eval(&terms.alpha1)?);
            let (b1, b2) = (ev.eval(&terms.beta1)?, ev.eval(&terms.beta2)?);
            let first = -lap - 1.5 * alpha * alpha + a1;
            let second = 0.5 * a1 + b2 - 2.0 * b1 * b1 - 0.5 * alpha * b1;
            let mut expected = [[0.0; 4]; 4];
            expected[0][1] = first;
            expected[1][0] = -first;
            expected[3][2] = second;
            expected[2][3] = -second;
            let mut worst = 0.0f64;
            for a in 0..4 {
                for b in 0..4 {
                    let rho: f64 = (0..4).map(|c| jbar.images[a][c] * cd.ricci[c][b]).sum();
                    worst = worst.max((rho - expected[a][b]).abs());
                }
            }
            acc.put("ricci_form", worst);
        }
        Ok(acc)
    })();
    finish("ricci_form_calabi", points.len(), tol, r)
}

/// `τ = 2(−(Δ ln h)e^A/h² − 2α² + 2α′ + β″/β − 2(β′/β)²)`
pub fn check_tau(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    if v.model().family() != Family::Calabi {
        return not_applicable("tau_calabi", points.len(), tol, "calabi family only");
    }
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let terms = calabi_terms(v)?;
        for p in points {
            let mut ev = Evaluator::new(p);
            let cd = curvature_at(v, &mut ev)?;
            let alpha = ev.eval(v.model().alpha())?;
            let (lap, a1) = (ev.eval(&terms.lap)?, ev.eval(&terms.alpha1)?);
            let (b1, b2) = (ev.eval(&terms.beta1)?, ev.eval(&terms.beta2)?);
            let tau = 2.0 * (-lap - 2.0 * alpha * alpha + 2.0 * a1 + b2 - 2.0 * b1 * b1);
            acc.put("tau", cd.tau - tau);
        }
        Ok(acc)
    })();
    finish("tau_calabi", points.len(), tol, r)
}

/// `dφ ∧ φ₁ ∧ φ₂ = 0` for `φ ∈ {φ₁, φ₂}` with `φ₁ = θ₁ + iθ₂` and
/// `φ₂ = θ₃ ± iθ₄`; the sign `+` is `J`, `−` is `J̄`.
pub fn check_integrability(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let fr = v.model().frame();
        let d: Vec<KForm> = (0..4).map(|i| fr.theta(i).ext_d()).collect::<Result<_, _>>()?;
        let unit = |i: usize| {
            let mut f = NumForm::zero(1);
            f.coeffs[1 << i] = 1.0;
            f
        };
        for p in points {
            let (mut ev, at) = frame_at(v, p)?;
            let dn: Vec<NumForm> = d.iter().map(|f| form_in_frame(f, &mut ev, &at)).collect::<Result<_, _>>()?;
            for (label, s) in [("J", 1.0), ("J_bar", -1.0)] {
                // φ₁ = a₁ + i b₁, φ₂ = a₂ + i b₂
                let (a1, b1) = (unit(0), unit(1));
                let (a2, b2) = (unit(2), unit(3).scaled(s));
                let re = a1.wedge(&a2).sub(&b1.wedge(&b2));
                let im = a1.wedge(&b2).add(&b1.wedge(&a2));
                let derivs = [(&dn[0], &dn[1], 1.0), (&dn[2], &dn[3], s)];
                for (n, (da, db, sb)) in derivs.into_iter().enumerate() {
                    let db = db.scaled(sb);
                    let real = da.wedge(&re).sub(&db.wedge(&im));
                    let imag = da.wedge(&im).add(&db.wedge(&re));
                    acc.put(&format!("{label}_dphi{}", n + 1), real.max_abs().max(imag.max_abs()));
                }
            }
        }
        Ok(acc)
    })();
    finish("integrability", points.len(), tol, r)
}

/// Smallest gap between W⁺ eigenvalues, over `1 + max |λ|`.
pub fn check_weyl_degenerate(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        for p in points {
            let cd = curvature_at(v, &mut Evaluator::new(p))?;
            let ev = cd.w_plus_eigenvalues();
            let scale = 1.0 + ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            acc.put("eigenvalue_gap", (ev[1] - ev[0]).min(ev[2] - ev[1]) / scale);
        }
        Ok(acc)
    })();
    finish("weyl_degenerate", points.len(), tol, r)
}

/// Planes per point in [`check_qch_quartic`].
pub const QCH_PLANES: usize = 16;

/// Least-squares fit of `R(X, J̄X, J̄X, X)` to `a + b t² + c t⁴` with
/// `t = |X_Δ|`, `Δ = span{E₃, E₄}`, over unit vectors
/// `X = cos s (cos φ E₁ + sin φ E₂) + sin s (cos ψ E₃ + sin ψ E₄)`.
pub fn check_qch_quartic(v: &Verifier, points: &[ChartPoint], seed: u64, tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let jbar = v.model().j_bar();
        for (n, p) in points.iter().enumerate() {
            let cd = curvature_at(v, &mut Evaluator::new(p))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(n as u64 + 1)));
            let mut rows = Vec::with_capacity(QCH_PLANES);
            let mut vals = Vec::with_capacity(QCH_PLANES);
            for k in 0..QCH_PLANES {
                let s = (k as f64 + 0.5) * PI / (2.0 * QCH_PLANES as f64);
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                let psi: f64 = rng.gen_range(0.0..2.0 * PI);
                let x = [
                    s.cos() * phi.cos(),
                    s.cos() * phi.sin(),
                    s.sin() * psi.cos(),
                    s.sin() * psi.sin(),
                ];
                let t2 = x[2] * x[2] + x[3] * x[3];
                rows.push([1.0, t2, t2 * t2]);
                vals.push(cd.holomorphic(&x, &jbar)?);
            }
            let a = DMatrix::from_fn(QCH_PLANES, 3, |r, c| rows[r][c]);
            let b = DVector::from_vec(vals);
            let coef = a
                .clone()
                .svd(true, true)
                .solve(&b, 1e-14)
                .map_err(|e| Fail(format!("least squares failed: {e}")))?;
            acc.put("fit_residual", (a * coef - b).amax());
        }
        Ok(acc)
    })();
    finish("qch_quartic", points.len(), tol, r)
}

/// `K(E₃, E₄) = 4a²` for `tan`, `−4a²` for `coth` and `tanh`.
pub fn check_fiber_curvature(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let m = v.model();
    let target = match m.a().and_then(|a| m.family().fiber_curvature(a)) {
        Some(t) => t,
        None => return not_applicable("fiber_curvature", points.len(), tol, "generalized families only"),
    };
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let (e3, e4) = ([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]);
        for p in points {
            let cd = curvature_at(v, &mut Evaluator::new(p))?;
            acc.put("fiber_sectional", cd.sectional(&e3, &e4)? - target);
        }
        acc.detail = Some(format!("target {target}"));
        Ok(acc)
    })();
    finish("fiber_curvature", points.len(), tol, r)
}

/// Calabi family: `dθ = 0`. Generalized families: `dθ` is not identically
/// zero, witnessed by `max |dθ| ≥ 10³ tol`.
pub fn check_lck(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let d = v.model().lee_form().ext_d()?;
        let mut witness = 0.0f64;
        for p in points {
            let (mut ev, at) = frame_at(v, p)?;
            let n = form_in_frame(&d, &mut ev, &at)?.max_abs();
            witness = if n.is_nan() { f64::NAN } else { witness.max(n) };
        }
        if v.model().family() == Family::Calabi {
            acc.put("dtheta", witness);
            acc.detail = Some("dθ = 0 required".into());
        } else {
            let threshold = NONZERO_FACTOR * tol;
            acc.put("inverse_max_dtheta", 1.0 / witness);
            acc.tolerance = Some(1.0 / threshold);
            acc.detail = Some(format!("max |dθ| = {witness:e}; dθ ≠ 0 required (threshold {threshold:e})"));
        }
        Ok(acc)
    })();
    finish("lck", points.len(), tol, r)
}

/// `L_{∂t} g = 0` in frame components.
pub fn check_killing(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    if v.model().family() != Family::Calabi {
        return not_applicable("killing_calabi", points.len(), tol, "calabi family only");
    }
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let fr = v.model().frame();
        let mut lie = Vec::new();
        for i in 0..4 {
            let terms: Vec<(Mask, ScalarField)> = fr
                .theta(i)
                .terms()
                .map(|(m, c)| Ok((m, c.partial(Coord::T)?)))
                .collect::<Result<_, FieldError>>()?;
            lie.push(KForm::from_terms(1, terms));
        }
        for p in points {
            let (mut ev, at) = frame_at(v, p)?;
            let mut mtx = [[0.0; 4]; 4];
            for i in 0..4 {
                let f = form_in_frame(&lie[i], &mut ev, &at)?;
                for a in 0..4 {
                    mtx[i][a] = f.get(1 << a);
                }
            }
            let mut worst = 0.0f64;
            for a in 0..4 {
                for b in 0..4 {
                    worst = worst.max((mtx[a][b] + mtx[b][a]).abs());
                }
            }
            acc.put("lie_derivative", worst);
        }
        Ok(acc)
    })();
    finish("killing_calabi", points.len(), tol, r)
}

/// `E₄ ln α − α/2`: identically zero for the `−2/z` profile, bounded away
/// from zero otherwise. A user-defined profile is classified by the data.
pub fn check_semisym(v: &Verifier, points: &[ChartPoint], tol: f64) -> CheckResult {
    let r = (|| -> Result<Acc, Fail> {
        let mut acc = Acc::default();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for p in points {
            let mut ev = Evaluator::new(p);
            let (alpha, e) = alpha_data(v, &mut ev)?;
            let c = (e[3] - alpha / 2.0).abs();
            if c.is_nan() {
                return Err(Fail(format!("criterion undefined at {:?}", p.coords)));
            }
            lo = lo.min(c);
            hi = hi.max(c);
        }
        let expect_zero = match v.model().alpha_kind() {
            AlphaKind::SemiSymmetric => true,
            AlphaKind::UserDefined => hi <= tol,
            _ => false,
        };
        if expect_zero {
            acc.put("criterion", hi);
            acc.detail = Some("semi-symmetric: E₄ ln α = α/2".into());
        } else {
            let threshold = NONZERO_FACTOR * tol;
            acc.put("inverse_min_criterion", 1.0 / lo);
            acc.tolerance = Some(1.0 / threshold);
            acc.detail = Some(format!(
                "not semi-symmetric: min |E₄ ln α − α/2| = {lo:e} (threshold {threshold:e})"
            ));
        }
        Ok(acc)
    })();
    finish("semisym_criterion", points.len(), tol, r)
}
