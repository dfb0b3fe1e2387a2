use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::scalar::{Coord, Evaluator, FieldError, ScalarField};

/// A set of basis indices encoded as a bitmask; bit `i` is index `i`.
/// Used both for coordinate differentials (`dx = bit 0 ... dt = bit 3`) and
/// for frame coforms (`θ₁ = bit 0 ... θ₄ = bit 3`).
pub type Mask = u8;

pub(crate) fn indices(mask: Mask) -> impl Iterator<Item = usize> {
    (0..4).filter(move |i| mask & (1 << i) != 0)
}

pub(crate) fn masks_of_degree(k: u32) -> impl Iterator<Item = Mask> {
    (0u8..16).filter(move |m| m.count_ones() == k)
}

/// Sign of the permutation that sorts the concatenation `(a, b)` of two
/// disjoint increasing index lists.
pub(crate) fn merge_sign(a: Mask, b: Mask) -> f64 {
    let mut inversions = 0;
    for i in indices(a) {
        inversions += (b & ((1u8 << i) - 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Differential form on the chart with coefficients in the coordinate
/// cobasis `dx, dy, dz, dt`.
#[derive(Clone, Debug)]
pub struct KForm {
    degree: u32,
    terms: BTreeMap<Mask, ScalarField>,
}

impl KForm {
    /// Zero form of the given degree. Degrees above 4 are allowed and are
    /// always zero.
    pub fn zero(degree: u32) -> KForm {
        KForm {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn function(f: ScalarField) -> KForm {
        let mut k = KForm::zero(0);
        k.push(0, f);
        k
    }

    /// `f dc`
    pub fn differential(c: Coord) -> KForm {
        KForm::one_form([0, 1, 2, 3].map(|i| {
            if i == c.index() {
                ScalarField::one()
            } else {
                ScalarField::zero()
            }
        }))
    }

    /// `a dx + b dy + c dz + d dt`
    pub fn one_form(coeffs: [ScalarField; 4]) -> KForm {
        let mut k = KForm::zero(1);
        for (i, f) in coeffs.into_iter().enumerate() {
            k.push(1 << i, f);
        }
        k
    }

    /// Build from `(mask, coefficient)` pairs; repeated masks accumulate.
    pub fn from_terms(degree: u32, terms: impl IntoIterator<Item = (Mask, ScalarField)>) -> KForm {
        let mut k = KForm::zero(degree);
        for (m, f) in terms {
            assert_eq!(m.count_ones(), degree, "multi-index does not match degree");
            k.push(m, f);
        }
        k
    }

    fn push(&mut self, mask: Mask, f: ScalarField) {
        if f.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&mask) {
            Some(g) => g + f,
            None => f,
        };
        if !merged.is_zero() {
            self.terms.insert(mask, merged);
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeff(&self, mask: Mask) -> ScalarField {
        self.terms.get(&mask).cloned().unwrap_or_else(ScalarField::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, &ScalarField)> {
        self.terms.iter().map(|(m, f)| (*m, f))
    }

    /// True when every coefficient folded to the literal zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, f: &ScalarField) -> KForm {
        KForm::from_terms(self.degree, self.terms.iter().map(|(m, c)| (*m, c * f)))
    }

    pub fn wedge(&self, other: &KForm) -> KForm {
        let degree = self.degree + other.degree;
        let mut out = KForm::zero(degree);
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                out.push(a | b, merge_sign(*a, *b) * &(f * g));
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn ext_d(&self) -> Result<KForm, FieldError> {
        let mut out = KForm::zero(self.degree + 1);
        if self.degree >= 4 {
            return Ok(out);
        }
        for (m, f) in &self.terms {
            for c in Coord::ALL {
                let bit = 1u8 << c.index();
                if m & bit != 0 {
                    continue;
                }
                let df = f.partial(c)?;
                out.push(m | bit, merge_sign(bit, *m) * &df);
            }
        }
        Ok(out)
    }

    /// Evaluate all coefficients at the evaluator's point.
    pub fn eval(&self, ev: &mut Evaluator) -> Result<NumForm, FieldError> {
        let mut coeffs = [0.0; 16];
        for (m, f) in &self.terms {
            coeffs[*m as usize] = ev.eval(f)?;
        }
        Ok(NumForm {
            degree: self.degree,
            coeffs,
        })
    }
}

impl Add<&KForm> for &KForm {
    type Output = KForm;
    fn add(self, rhs: &KForm) -> KForm {
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (m, f) in &rhs.terms {
            out.push(*m, f.clone());
        }
        out
    }
}

impl Sub<&KForm> for &KForm {
    type Output = KForm;
    fn sub(self, rhs: &KForm) -> KForm {
        self + &(-rhs)
    }
}

impl Neg for &KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        KForm::from_terms(self.degree, self.terms.iter().map(|(m, f)| (*m, -f)))
    }
}

impl Add for KForm {
    type Output = KForm;
    fn add(self, rhs: KForm) -> KForm {
        &self + &rhs
    }
}

impl Sub for KForm {
    type Output = KForm;
    fn sub(self, rhs: KForm) -> KForm {
        &self - &rhs
    }
}

impl Neg for KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        -&self
    }
}

const DIFFERENTIALS: [&str; 4] = ["dx", "dy", "dz", "dt"];

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            let basis: Vec<_> = indices(*m).map(|i| DIFFERENTIALS[i]).collect();
            if !basis.is_empty() {
                write!(f, " {}", basis.join("^"))?;
            }
        }
        Ok(())
    }
}

/// Coefficients of a form at one point, indexed by mask.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumForm {
    pub degree: u32,
    pub coeffs: [f64; 16],
}

impl NumForm {
    pub fn zero(degree: u32) -> NumForm {
        NumForm {
            degree,
            coeffs: [0.0; 16],
        }
    }

    pub fn get(&self, mask: Mask) -> f64 {
        self.coeffs[mask as usize]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &NumForm) -> NumForm {
        let mut out = *self;
        for (o, v) in out.coeffs.iter_mut().zip(other.coeffs) {
            *o -= v;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> NumForm {
        let mut out = *self;
        out.coeffs.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &NumForm) -> NumForm {
        self.sub(&other.scaled(-1.0))
    }

    /// Value on vectors `v₁..v_k` (given in the same basis as the form).
    pub fn on(&self, vectors: &[[f64; 4]]) -> f64 {
        assert_eq!(vectors.len(), self.degree as usize);
        let mut acc = 0.0;
        for m in masks_of_degree(self.degree) {
            let c = self.coeffs[m as usize];
            if c == 0.0 {
                continue;
            }
            let cols: Vec<usize> = indices(m).collect();
            acc += c * minor(vectors, &cols);
        }
        acc
    }

    /// Rewrite in a new cobasis given the new basis vectors expressed in the
    /// old basis: component `I` becomes the value on `(b_{i₁}, …, b_{i_k})`.
    pub fn in_basis(&self, basis: &[[f64; 4]; 4]) -> NumForm {
        let mut out = NumForm::zero(self.degree);
        for m in masks_of_degree(self.degree) {
            let vs: Vec<[f64; 4]> = indices(m).map(|i| basis[i]).collect();
            out.coeffs[m as usize] = self.on(&vs);
        }
        out
    }

    pub fn wedge(&self, other: &NumForm) -> NumForm {
        let mut out = NumForm::zero(self.degree + other.degree);
        if out.degree > 4 {
            return out;
        }
        for a in masks_of_degree(self.degree) {
            for b in masks_of_degree(other.degree) {
                if a & b == 0 {
                    out.coeffs[(a | b) as usize] +=
                        merge_sign(a, b) * self.coeffs[a as usize] * other.coeffs[b as usize];
                }
            }
        }
        out
    }

    /// Hodge star for components taken in an oriented orthonormal cobasis.
    pub fn star(&self) -> NumForm {
        let mut out = NumForm::zero(4 - self.degree);
        for m in masks_of_degree(self.degree) {
            let rest = 0b1111 ^ m;
            out.coeffs[rest as usize] = merge_sign(m, rest) * self.coeffs[m as usize];
        }
        out
    }

    /// Pointwise inner product for components in an orthonormal cobasis.
    pub fn dot(&self, other: &NumForm) -> f64 {
        assert_eq!(self.degree, other.degree);
        self.coeffs.iter().zip(other.coeffs).map(|(a, b)| a * b).sum()
    }
}

/// `det [v_r[cols[s]]]` for `k` vectors and `k` selected components.
fn minor(vectors: &[[f64; 4]], cols: &[usize]) -> f64 {
    match cols.len() {
        0 => 1.0,
        1 => vectors[0][cols[0]],
        k => {
            let mut acc = 0.0;
            for (s, _) in cols.iter().enumerate() {
                let rest: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| *r != s)
                    .map(|(_, c)| *c)
                    .collect();
                let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
                let entry = vectors[0][cols[s]];
                if entry != 0.0 {
                    acc += sign * entry * minor(&vectors[1..k], &rest);
                }
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ChartPoint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const DX: Mask = 0b0001;
    const DY: Mask = 0b0010;
    const DZ: Mask = 0b0100;
    const DT: Mask = 0b1000;

    fn d(c: Coord) -> KForm {
        KForm::differential(c)
    }

    fn random_poly(rng: &mut ChaCha8Rng) -> ScalarField {
        let v = [ScalarField::x(), ScalarField::y(), ScalarField::z(), ScalarField::t()];
        let mut f = ScalarField::constant(rng.gen_range(-1.0..1.0));
        for _ in 0..5 {
            let i = rng.gen_range(0..4);
            let j = rng.gen_range(0..4);
            f = f + rng.gen_range(-2.0..2.0) * &v[i] * &v[j] * (&v[(i + j) % 4]).sin();
        }
        f
    }

    fn random_form(rng: &mut ChaCha8Rng, degree: u32) -> KForm {
        KForm::from_terms(degree, masks_of_degree(degree).map(|m| (m, random_poly(rng))).collect::<Vec<_>>())
    }

    fn points(rng: &mut ChaCha8Rng, n: usize) -> Vec<ChartPoint> {
        (0..n)
            .map(|_| {
                ChartPoint::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect()
    }

    fn max_abs(form: &KForm, pts: &[ChartPoint]) -> f64 {
        pts.iter()
            .map(|p| form.eval(&mut Evaluator::new(p)).unwrap().max_abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn wedge_of_differentials() {
        let a = d(Coord::X).wedge(&d(Coord::Y));
        assert_eq!(a.coeff(DX | DY).as_constant(), Some(1.0));
        let b = d(Coord::Y).wedge(&d(Coord::X));
        assert_eq!(b.coeff(DX | DY).as_constant(), Some(-1.0));
        let vol = d(Coord::T).wedge(&d(Coord::Z)).wedge(&d(Coord::Y)).wedge(&d(Coord::X));
        assert_eq!(vol.coeff(DX | DY | DZ | DT).as_constant(), Some(1.0));
        assert!(d(Coord::X).wedge(&d(Coord::X)).is_zero());
        assert!(vol.wedge(&d(Coord::X)).is_zero());
    }

    #[test]
    fn d_of_x_dy() {
        let f = KForm::one_form([
            ScalarField::zero(),
            ScalarField::x(),
            ScalarField::zero(),
            ScalarField::zero(),
        ]);
        let df = f.ext_d().unwrap();
        assert_eq!(df.degree(), 2);
        assert_eq!(df.coeff(DX | DY).as_constant(), Some(1.0));
        assert_eq!(df.terms().count(), 1);
    }

    #[test]
    fn d_squared_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = points(&mut rng, 100);
        for degree in 0..3 {
            let a = random_form(&mut rng, degree);
            let dda = a.ext_d().unwrap().ext_d().unwrap();
            assert!(max_abs(&dda, &pts) <= 1e-10, "degree {degree}");
        }
    }

    #[test]
    fn graded_commutativity_and_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts = points(&mut rng, 100);
        for (p, q) in [(0, 1), (1, 1), (1, 2), (2, 2), (0, 3)] {
            let a = random_form(&mut rng, p);
            let b = random_form(&mut rng, q);
            let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
            let ab = a.wedge(&b);
            let ba = b.wedge(&a).scale(&ScalarField::constant(sign));
            assert!(max_abs(&(&ab - &ba), &pts) <= 1e-12);

            let lhs = ab.ext_d().unwrap();
            let s = if p % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = &a.ext_d().unwrap().wedge(&b)
                + &a.wedge(&b.ext_d().unwrap()).scale(&ScalarField::constant(s));
            assert!(max_abs(&(&lhs - &rhs), &pts) <= 1e-10, "Leibniz for degrees {p}, {q}");
        }
    }

    #[test]
    fn wedge_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts = points(&mut rng, 30);
        let (a, b, c) = (random_form(&mut rng, 1), random_form(&mut rng, 1), random_form(&mut rng, 2));
        let l = a.wedge(&b).wedge(&c);
        let r = a.wedge(&b.wedge(&c));
        assert!(max_abs(&(&l - &r), &pts) <= 1e-12);
    }

    #[test]
    fn numeric_star_and_pairing() {
        let mut e12 = NumForm::zero(2);
        e12.coeffs[0b0011] = 1.0;
        let s = e12.star();
        assert_eq!(s.get(0b1100), 1.0);
        assert_eq!(s.star(), e12);
        let mut e13 = NumForm::zero(2);
        e13.coeffs[0b0101] = 1.0;
        assert_eq!(e13.star().get(0b1010), -1.0);
        let mut vol = NumForm::zero(4);
        vol.coeffs[15] = 1.0;
        assert_eq!(vol.star().get(0), 1.0);
        // (dx^dy)(u, v) = u_x v_y - u_y v_x
        assert_eq!(e12.on(&[[1.0, 2.0, 0.0, 0.0], [3.0, 5.0, 0.0, 0.0]]), -1.0);
    }

    #[test]
    fn merge_sign_counts_inversions() {
        assert_eq!(merge_sign(DX, DY), 1.0);
        assert_eq!(merge_sign(DY, DX), -1.0);
        assert_eq!(merge_sign(DZ | DT, DX | DY), 1.0);
        assert_eq!(merge_sign(DY, DX | DZ), -1.0);
    }
}
