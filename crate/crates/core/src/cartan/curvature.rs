use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix3, SymmetricEigen};

use crate::exterior::{FrameAt, FramePair, KForm, VectorField};
use crate::scalar::{ChartPoint, Evaluator, FieldError, ScalarField};

use super::{CartanError, ConnectionForms};

/// Curvature 2-forms `Ω^i_j = dω^i_j + Σ_m ω^i_m ∧ ω^m_j`, evaluated
/// pointwise on demand.
#[derive(Clone, Debug)]
pub struct Curvature {
    conn: ConnectionForms,
    forms: [[KForm; 4]; 4],
}

/// Second structure equation. Only `i < j` is assembled; the rest follows
/// from skew-symmetry.
pub fn curvature(conn: &ConnectionForms) -> Result<Curvature, FieldError> {
    let mut forms: [[KForm; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| KForm::zero(2)));
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut f = conn.omega(i, j).ext_d()?;
            for m in 0..4 {
                f = &f + &conn.omega(i, m).wedge(conn.omega(m, j));
            }
            forms[j][i] = -&f;
            forms[i][j] = f;
        }
    }
    Ok(Curvature {
        conn: conn.clone(),
        forms,
    })
}

/// Orthonormal self-dual basis `{Ω, Φ, Ψ}/√2` as antisymmetric frame
/// matrices `σ_ij` with `σ = ½ Σ σ_ij θ_i ∧ θ_j`.
fn self_dual_basis() -> [[[f64; 4]; 4]; 3] {
    let mut b = [[[0.0; 4]; 4]; 3];
    let s = FRAC_1_SQRT_2;
    let mut set = |n: usize, i: usize, j: usize, v: f64| {
        b[n][i][j] = v;
        b[n][j][i] = -v;
    };
    // Ω = θ12 + θ34, Φ = θ13 − θ24, Ψ = θ14 + θ23
    set(0, 0, 1, s);
    set(0, 2, 3, s);
    set(1, 0, 2, s);
    set(1, 1, 3, -s);
    set(2, 0, 3, s);
    set(2, 1, 2, s);
    b
}

impl Curvature {
    pub fn connection(&self) -> &ConnectionForms {
        &self.conn
    }

    pub fn frame(&self) -> &FramePair {
        self.conn.frame()
    }

    /// `Ω^i_j` (0-based).
    pub fn form(&self, i: usize, j: usize) -> &KForm {
        &self.forms[i][j]
    }

    pub fn at(&self, p: &ChartPoint) -> Result<CurvatureData, CartanError> {
        let mut ev = Evaluator::new(p);
        self.at_with(&mut ev)
    }

    pub fn at_with(&self, ev: &mut Evaluator) -> Result<CurvatureData, CartanError> {
        let frame = self.frame().at(ev)?;
        check_coframe(&frame, ev.point())?;
        let mut riemann = [[[[0.0; 4]; 4]; 4]; 4];
        for c in 0..4 {
            for d in (c + 1)..4 {
                let comps = frame.to_frame(&self.forms[d][c].eval(ev)?);
                for a in 0..4 {
                    for b in (a + 1)..4 {
                        let v = comps.get((1 << a) | (1 << b));
                        riemann[a][b][c][d] = v;
                        riemann[b][a][c][d] = -v;
                        riemann[a][b][d][c] = -v;
                        riemann[b][a][d][c] = v;
                    }
                }
            }
        }
        Ok(CurvatureData::from_riemann(riemann, frame))
    }
}

pub(crate) fn check_coframe(frame: &FrameAt, p: &ChartPoint) -> Result<(), CartanError> {
    let det = frame.coframe_det();
    let scale: f64 = frame
        .theta
        .iter()
        .map(|row| row.iter().map(|v| v * v).sum::<f64>().sqrt())
        .product();
    if scale == 0.0 || det.abs() <= 1e-12 * scale {
        return Err(CartanError::DegenerateCoframe { point: p.coords, det });
    }
    Ok(())
}

/// Curvature at one point, in the orthonormal frame.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    /// `riemann[a][b][c][d] = g(R(E_a, E_b) E_c, E_d)`
    pub riemann: [[[[f64; 4]; 4]; 4]; 4],
    /// `ricci[b][c] = Σ_a R(E_a, E_b, E_c, E_a)`
    pub ricci: [[f64; 4]; 4],
    pub tau: f64,
    /// W⁺ in the basis `{Ω, Φ, Ψ}/√2`.
    pub w_plus: [[f64; 3]; 3],
    pub frame: FrameAt,
}

impl CurvatureData {
    pub fn from_riemann(riemann: [[[[f64; 4]; 4]; 4]; 4], frame: FrameAt) -> CurvatureData {
        let mut ricci = [[0.0; 4]; 4];
        for b in 0..4 {
            for c in 0..4 {
                ricci[b][c] = (0..4).map(|a| riemann[a][b][c][a]).sum();
            }
        }
        let tau = (0..4).map(|i| ricci[i][i]).sum::<f64>();
        let basis = self_dual_basis();
        let mut w_plus = [[0.0; 3]; 3];
        for p in 0..3 {
            for q in 0..3 {
                let mut acc = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        for k in 0..4 {
                            for l in 0..4 {
                                acc += basis[p][i][j] * basis[q][k][l] * riemann[i][j][l][k];
                            }
                        }
                    }
                }
                w_plus[p][q] = 0.25 * acc - if p == q { tau / 12.0 } else { 0.0 };
            }
        }
        CurvatureData {
            riemann,
            ricci,
            tau,
            w_plus,
            frame,
        }
    }

    /// `R(X, Y, Z, W)` for frame-component vectors.
    pub fn r(&self, x: &[f64; 4], y: &[f64; 4], z: &[f64; 4], w: &[f64; 4]) -> f64 {
        let mut acc = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let xy = x[a] * y[b];
                if xy == 0.0 {
                    continue;
                }
                for c in 0..4 {
                    for d in 0..4 {
                        acc += xy * z[c] * w[d] * self.riemann[a][b][c][d];
                    }
                }
            }
        }
        acc
    }

    /// Sectional curvature of the plane spanned by two frame-component vectors.
    pub fn sectional(&self, x: &[f64; 4], y: &[f64; 4]) -> Result<f64, CartanError> {
        let dot = |u: &[f64; 4], v: &[f64; 4]| (0..4).map(|i| u[i] * v[i]).sum::<f64>();
        let area = dot(x, x) * dot(y, y) - dot(x, y).powi(2);
        if area <= 1e-14 * dot(x, x) * dot(y, y) || area == 0.0 {
            return Err(CartanError::DegeneratePlane);
        }
        Ok(self.r(x, y, y, x) / area)
    }

    /// `R(X, JX, JX, X)` for a unit frame-component vector.
    pub fn holomorphic(&self, x: &[f64; 4], j: &ComplexStructure) -> Result<f64, CartanError> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(CartanError::NotUnit { norm });
        }
        let jx = j.apply(x);
        Ok(self.r(x, &jx, &jx, x))
    }

    /// Eigenvalues of W⁺ in ascending order.
    pub fn w_plus_eigenvalues(&self) -> [f64; 3] {
        let m = Matrix3::from_fn(|i, j| self.w_plus[i][j]);
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2]]
    }

    /// Largest violation of the pair symmetries and the first Bianchi identity.
    pub fn symmetry_defect(&self) -> f64 {
        let r = &self.riemann;
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        worst = worst
                            .max((r[a][b][c][d] + r[b][a][c][d]).abs())
                            .max((r[a][b][c][d] + r[a][b][d][c]).abs())
                            .max((r[a][b][c][d] - r[c][d][a][b]).abs())
                            .max((r[a][b][c][d] + r[b][c][a][d] + r[c][a][b][d]).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Orthogonal almost-complex structure acting on frame components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexStructure {
    /// `images[i]` is `J E_i` in frame components.
    pub images: [[f64; 4]; 4],
}

impl ComplexStructure {
    /// `J E₁ = E₂, J E₃ = E₄`
    pub fn standard() -> ComplexStructure {
        ComplexStructure {
            images: [
                [0.0, 1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0, 0.0],
            ],
        }
    }

    /// `J̄ E₁ = E₂, J̄ E₃ = −E₄`
    pub fn opposite() -> ComplexStructure {
        ComplexStructure {
            images: [
                [0.0, 1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, -1.0],
                [0.0, 0.0, 1.0, 0.0],
            ],
        }
    }

    pub fn apply(&self, x: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, xi) in x.iter().enumerate() {
            for c in 0..4 {
                out[c] += xi * self.images[i][c];
            }
        }
        out
    }
}

/// Sectional curvature of `span{X, Y}` at a point.
pub fn sectional_curvature(
    curv: &Curvature,
    p: &ChartPoint,
    x: &VectorField,
    y: &VectorField,
) -> Result<f64, CartanError> {
    let mut ev = Evaluator::new(p);
    let data = curv.at_with(&mut ev)?;
    let xf = data.frame.vector_to_frame(&x.eval(&mut ev)?);
    let yf = data.frame.vector_to_frame(&y.eval(&mut ev)?);
    data.sectional(&xf, &yf)
}

/// Holomorphic sectional curvature `R(X, JX, JX, X)` for a unit `X`.
pub fn holomorphic_curvature(
    curv: &Curvature,
    p: &ChartPoint,
    x: &VectorField,
    j: &ComplexStructure,
) -> Result<f64, CartanError> {
    let mut ev = Evaluator::new(p);
    let data = curv.at_with(&mut ev)?;
    let xf = data.frame.vector_to_frame(&x.eval(&mut ev)?);
    data.holomorphic(&xf, j)
}

/// `∇a` for a 2-form `a`, as `(∇_{E_k} a)(E_i, E_j)`.
#[derive(Clone, Debug)]
pub struct CovariantDerivative2 {
    conn: ConnectionForms,
    /// `E_k(a(E_i, E_j))`, indexed `[k][i][j]`
    derivs: Vec<Vec<Vec<ScalarField>>>,
    /// `a(E_i, E_j)`
    comps: Vec<Vec<ScalarField>>,
}

pub fn covariant_derivative_2form(a: &KForm, conn: &ConnectionForms) -> Result<CovariantDerivative2, FieldError> {
    assert_eq!(a.degree(), 2, "covariant derivative of a {}-form requested", a.degree());
    let frame = conn.frame();
    let fc = frame.frame_components(a);
    let mut comps = vec![vec![ScalarField::zero(); 4]; 4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            let v = fc[&((1u8 << i) | (1u8 << j))].clone();
            comps[j][i] = -&v;
            comps[i][j] = v;
        }
    }
    let mut derivs = vec![vec![vec![ScalarField::zero(); 4]; 4]; 4];
    for (k, dk) in derivs.iter_mut().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                dk[i][j] = frame.e(k).apply(&comps[i][j])?;
            }
        }
    }
    Ok(CovariantDerivative2 {
        conn: conn.clone(),
        derivs,
        comps,
    })
}

impl CovariantDerivative2 {
    /// `(∇_{E_k} a)(E_i, E_j)` at a point, indexed `[k][i][j]`.
    pub fn at_with(&self, ev: &mut Evaluator) -> Result<[[[f64; 4]; 4]; 4], CartanError> {
        let frame = self.conn.frame().at(ev)?;
        check_coframe(&frame, ev.point())?;
        let g = self.conn.gamma_at(ev)?;
        let mut a = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                a[i][j] = ev.eval(&self.comps[i][j])?;
            }
        }
        let mut out = [[[0.0; 4]; 4]; 4];
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    let mut v = ev.eval(&self.derivs[k][i][j])?;
                    for m in 0..4 {
                        v -= g[m][k][i] * a[m][j] + g[m][k][j] * a[i][m];
                    }
                    out[k][i][j] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn at(&self, p: &ChartPoint) -> Result<[[[f64; 4]; 4]; 4], CartanError> {
        self.at_with(&mut Evaluator::new(p))
    }
}
