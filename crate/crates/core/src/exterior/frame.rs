use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{ChartPoint, Coord, Evaluator, FieldError, ScalarField};

use super::form::{indices, masks_of_degree, merge_sign, Mask};
use super::{KForm, NumForm, VectorField};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ExteriorError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("coframe is degenerate at (x, y, z, t) = {point:?} (determinant {det:e})")]
    DegenerateCoframe { point: [f64; 4], det: f64 },
}

/// Coordinate box on which a frame is declared valid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub z: (f64, f64),
    pub t: (f64, f64),
}

impl Domain {
    pub fn new(x: (f64, f64), y: (f64, f64), z: (f64, f64), t: (f64, f64)) -> Domain {
        Domain { x, y, z, t }
    }

    pub fn range(&self, c: Coord) -> (f64, f64) {
        match c {
            Coord::X => self.x,
            Coord::Y => self.y,
            Coord::Z => self.z,
            Coord::T => self.t,
        }
    }

    /// `n` points drawn uniformly from the box; deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<ChartPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |(lo, hi): (f64, f64)| if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        (0..n)
            .map(|_| {
                let x = draw(self.x);
                let y = draw(self.y);
                let z = draw(self.z);
                let t = draw(self.t);
                ChartPoint::new(x, y, z, t)
            })
            .collect()
    }
}

/// Orthonormal coframe `θ₁..θ₄` with its dual frame `E₁..E₄`.
///
/// The metric is `Σ θᵢ ⊗ θᵢ` and the orientation is `θ₁∧θ₂∧θ₃∧θ₄`.
#[derive(Debug)]
pub struct FramePair {
    coframe: [KForm; 4],
    frame: [VectorField; 4],
    domain: Domain,
    basis: OnceLock<Vec<KForm>>,
}

impl Clone for FramePair {
    fn clone(&self) -> Self {
        FramePair::new(self.coframe.clone(), self.frame.clone(), self.domain)
    }
}

impl FramePair {
    /// Pair a coframe with a dual frame supplied in closed form. Duality is
    /// not checked here; see [`FramePair::duality_residual`].
    pub fn new(coframe: [KForm; 4], frame: [VectorField; 4], domain: Domain) -> FramePair {
        for th in &coframe {
            assert_eq!(th.degree(), 1, "coframe entries must be 1-forms");
        }
        FramePair {
            coframe,
            frame,
            domain,
            basis: OnceLock::new(),
        }
    }

    /// Pair a coframe with its symbolically inverted dual frame, rejecting
    /// coframes that degenerate at any of the check points.
    pub fn from_coframe(
        coframe: [KForm; 4],
        domain: Domain,
        check_points: &[ChartPoint],
    ) -> Result<FramePair, ExteriorError> {
        let frame = dual_frame(&coframe, check_points)?;
        Ok(FramePair::new(coframe, frame, domain))
    }

    /// The coordinate coframe `dx, dy, dz, dt` (flat metric).
    pub fn coordinate(domain: Domain) -> FramePair {
        FramePair::new(
            Coord::ALL.map(KForm::differential),
            Coord::ALL.map(VectorField::coordinate),
            domain,
        )
    }

    pub fn theta(&self, i: usize) -> &KForm {
        &self.coframe[i]
    }

    pub fn e(&self, i: usize) -> &VectorField {
        &self.frame[i]
    }

    pub fn coframe(&self) -> &[KForm; 4] {
        &self.coframe
    }

    pub fn frame(&self) -> &[VectorField; 4] {
        &self.frame
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// `θ_I = θ_{i₁} ∧ … ∧ θ_{i_k}` for a frame multi-index.
    pub fn basis_form(&self, mask: Mask) -> &KForm {
        let all = self.basis.get_or_init(|| {
            (0u8..16)
                .map(|m| {
                    indices(m).fold(KForm::function(ScalarField::one()), |acc, i| {
                        acc.wedge(&self.coframe[i])
                    })
                })
                .collect()
        });
        &all[mask as usize]
    }

    /// `θ₁∧θ₂∧θ₃∧θ₄`
    pub fn volume(&self) -> &KForm {
        self.basis_form(0b1111)
    }

    /// Assemble `Σ c_I θ_I` from frame components.
    pub fn from_frame_components(&self, degree: u32, comps: &BTreeMap<Mask, ScalarField>) -> KForm {
        let mut out = KForm::zero(degree);
        for (m, c) in comps {
            debug_assert_eq!(m.count_ones(), degree);
            if !c.is_zero() {
                out = &out + &self.basis_form(*m).scale(c);
            }
        }
        out
    }

    /// Symbolic frame components `a(E_{i₁}, …, E_{i_k})`.
    pub fn frame_components(&self, a: &KForm) -> BTreeMap<Mask, ScalarField> {
        let k = a.degree();
        let mut out = BTreeMap::new();
        for m in masks_of_degree(k) {
            let vs: Vec<&VectorField> = indices(m).map(|i| &self.frame[i]).collect();
            let mut acc = ScalarField::zero();
            for (cm, coeff) in a.terms() {
                let cols: Vec<usize> = indices(cm).collect();
                acc = acc + coeff * &symbolic_minor(&vs, &cols);
            }
            out.insert(m, acc);
        }
        out
    }

    /// Numeric frame data at the evaluator's point.
    pub fn at(&self, ev: &mut Evaluator) -> Result<FrameAt, FieldError> {
        let mut theta = [[0.0; 4]; 4];
        let mut e = [[0.0; 4]; 4];
        for i in 0..4 {
            for c in 0..4 {
                theta[i][c] = ev.eval(&self.coframe[i].coeff(1 << c))?;
            }
            e[i] = self.frame[i].eval(ev)?;
        }
        Ok(FrameAt { theta, e })
    }

    /// `max |θᵢ(E_j) − δᵢⱼ|` over the points.
    pub fn duality_residual(&self, points: &[ChartPoint]) -> Result<f64, FieldError> {
        let mut worst: f64 = 0.0;
        for p in points {
            let at = self.at(&mut Evaluator::new(p))?;
            for i in 0..4 {
                for j in 0..4 {
                    let v: f64 = (0..4).map(|c| at.theta[i][c] * at.e[j][c]).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((v - target).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Numeric coframe and frame at one point. `theta[i][c]` is the `dc`
/// coefficient of `θᵢ`; `e[j][c]` is the `∂c` component of `E_j`.
#[derive(Clone, Copy, Debug)]
pub struct FrameAt {
    pub theta: [[f64; 4]; 4],
    pub e: [[f64; 4]; 4],
}

impl FrameAt {
    /// Components of a coordinate-basis form in the orthonormal coframe.
    pub fn to_frame(&self, form: &NumForm) -> NumForm {
        form.in_basis(&self.e)
    }

    /// Frame components `θᵢ(v)` of a coordinate vector.
    pub fn vector_to_frame(&self, v: &[f64; 4]) -> [f64; 4] {
        self.theta.map(|row| (0..4).map(|c| row[c] * v[c]).sum())
    }

    /// Coordinate components of `Σ wⱼ E_j`.
    pub fn vector_from_frame(&self, w: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (j, wj) in w.iter().enumerate() {
            for c in 0..4 {
                out[c] += wj * self.e[j][c];
            }
        }
        out
    }

    pub fn coframe_det(&self) -> f64 {
        det4(&self.theta)
    }
}

fn symbolic_minor(vectors: &[&VectorField], cols: &[usize]) -> ScalarField {
    match cols.len() {
        0 => ScalarField::one(),
        1 => vectors[0].0[cols[0]].clone(),
        _ => {
            let mut acc = ScalarField::zero();
            for s in 0..cols.len() {
                let entry = &vectors[0].0[cols[s]];
                if entry.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| *r != s)
                    .map(|(_, c)| *c)
                    .collect();
                let term = entry * &symbolic_minor(&vectors[1..], &rest);
                acc = if s % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    nalgebra::Matrix4::from_fn(|i, j| m[i][j]).determinant()
}

/// Symbolic cofactor of `m` at `(row, col)`.
fn cofactor(m: &[[ScalarField; 4]; 4], row: usize, col: usize) -> ScalarField {
    let rows: Vec<usize> = (0..4).filter(|r| *r != row).collect();
    let cols: Vec<usize> = (0..4).filter(|c| *c != col).collect();
    let e = |r: usize, c: usize| &m[rows[r]][cols[c]];
    let minor = e(0, 0) * &(e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * &(e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * &(e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
    if (row + col) % 2 == 0 {
        minor
    } else {
        -minor
    }
}

/// Dual frame of a coframe by symbolic adjugate/determinant inversion.
///
/// The determinant is checked at each of `check_points`; a (relative)
/// vanishing determinant is reported with the offending point.
pub fn dual_frame(coframe: &[KForm; 4], check_points: &[ChartPoint]) -> Result<[VectorField; 4], ExteriorError> {
    let m: [[ScalarField; 4]; 4] = [0, 1, 2, 3].map(|i| [0, 1, 2, 3].map(|c| coframe[i].coeff(1 << c)));
    let cof: Vec<Vec<ScalarField>> = (0..4)
        .map(|r| (0..4).map(|c| cofactor(&m, r, c)).collect())
        .collect();
    let det: ScalarField = (0..4).map(|c| &m[0][c] * &cof[0][c]).sum();

    for p in check_points {
        let mut ev = Evaluator::new(p);
        let mut num = [[0.0; 4]; 4];
        for i in 0..4 {
            for c in 0..4 {
                num[i][c] = ev.eval(&m[i][c])?;
            }
        }
        let d = det4(&num);
        // Hadamard bound: |det| <= product of row norms.
        let scale: f64 = num
            .iter()
            .map(|row| row.iter().map(|v| v * v).sum::<f64>().sqrt())
            .product();
        if scale == 0.0 || d.abs() <= 1e-12 * scale {
            return Err(ExteriorError::DegenerateCoframe {
                point: p.coords,
                det: d,
            });
        }
    }

    // E_j = Σ_c (M⁻¹)_{cj} ∂c and (M⁻¹)_{cj} = cof_{jc} / det.
    Ok([0, 1, 2, 3].map(|j| VectorField([0, 1, 2, 3].map(|c| &cof[j][c] / &det))))
}

/// Hodge star with respect to the frame metric and `vol = θ₁∧θ₂∧θ₃∧θ₄`.
pub fn hodge_star(a: &KForm, frame: &FramePair) -> KForm {
    let comps = frame.frame_components(a);
    let mut starred = BTreeMap::new();
    for (m, c) in comps {
        let rest = 0b1111 ^ m;
        starred.insert(rest, merge_sign(m, rest) * &c);
    }
    frame.from_frame_components(4 - a.degree(), &starred)
}

/// `a = a⁺ + a⁻` with `*a⁺ = a⁺` and `*a⁻ = −a⁻`.
pub fn sd_asd_split(a: &KForm, frame: &FramePair) -> (KForm, KForm) {
    assert_eq!(a.degree(), 2, "self-dual split needs a 2-form");
    let s = hodge_star(a, frame);
    let half = ScalarField::constant(0.5);
    ((a + &s).scale(&half), (a - &s).scale(&half))
}

/// `δ = −*d*`, the codifferential in dimension four.
pub fn codifferential(a: &KForm, frame: &FramePair) -> Result<KForm, FieldError> {
    let inner = hodge_star(a, frame).ext_d()?;
    Ok(-hodge_star(&inner, frame))
}
