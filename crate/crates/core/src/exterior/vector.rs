use std::ops::{Add, Sub};

use crate::scalar::{Coord, Evaluator, FieldError, ScalarField};

use super::KForm;

/// Vector field with components in the coordinate basis `∂x, ∂y, ∂z, ∂t`.
#[derive(Clone, Debug)]
pub struct VectorField(pub [ScalarField; 4]);

impl VectorField {
    pub fn zero() -> VectorField {
        VectorField([0; 4].map(|_| ScalarField::zero()))
    }

    /// The coordinate field `∂c`.
    pub fn coordinate(c: Coord) -> VectorField {
        let mut v = VectorField::zero();
        v.0[c.index()] = ScalarField::one();
        v
    }

    pub fn component(&self, c: Coord) -> &ScalarField {
        &self.0[c.index()]
    }

    pub fn scale(&self, f: &ScalarField) -> VectorField {
        VectorField(self.0.clone().map(|c| &c * f))
    }

    /// `X(f)`
    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField, FieldError> {
        f.directional(&self.0)
    }

    /// `α(X)` for a 1-form `α`.
    pub fn pair(&self, form: &KForm) -> ScalarField {
        assert_eq!(form.degree(), 1, "pairing a vector with a {}-form", form.degree());
        Coord::ALL
            .iter()
            .map(|c| &form.coeff(1 << c.index()) * &self.0[c.index()])
            .sum()
    }

    pub fn eval(&self, ev: &mut Evaluator) -> Result<[f64; 4], FieldError> {
        let mut out = [0.0; 4];
        for (o, c) in out.iter_mut().zip(&self.0) {
            *o = ev.eval(c)?;
        }
        Ok(out)
    }
}

/// `[X, Y]^c = X(Y^c) − Y(X^c)`
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, FieldError> {
    let mut out = VectorField::zero();
    for c in Coord::ALL {
        out.0[c.index()] = x.apply(y.component(c))? - y.apply(x.component(c))?;
    }
    Ok(out)
}

impl Add<&VectorField> for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField([0, 1, 2, 3].map(|i| &self.0[i] + &rhs.0[i]))
    }
}

impl Sub<&VectorField> for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField([0, 1, 2, 3].map(|i| &self.0[i] - &rhs.0[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ChartPoint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(rng: &mut ChaCha8Rng) -> VectorField {
        let v = [ScalarField::x(), ScalarField::y(), ScalarField::z(), ScalarField::t()];
        VectorField([0; 4].map(|_| {
            let mut f = ScalarField::constant(rng.gen_range(-1.0..1.0));
            for _ in 0..3 {
                let (i, j) = (rng.gen_range(0..4), rng.gen_range(0..4));
                f = f + rng.gen_range(-1.0..1.0) * &v[i] * &v[j];
            }
            f
        }))
    }

    #[test]
    fn bracket_of_dx_and_x_dx() {
        let dx = VectorField::coordinate(Coord::X);
        let x_dx = dx.scale(&ScalarField::x());
        let b = lie_bracket(&dx, &x_dx).unwrap();
        let p = ChartPoint::new(0.3, 0.1, 0.2, 0.4);
        assert_eq!(b.eval(&mut Evaluator::new(&p)).unwrap(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn jacobi_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let (x, y, z) = (random_field(&mut rng), random_field(&mut rng), random_field(&mut rng));
            let j = &(&lie_bracket(&x, &lie_bracket(&y, &z).unwrap()).unwrap()
                + &lie_bracket(&y, &lie_bracket(&z, &x).unwrap()).unwrap())
                + &lie_bracket(&z, &lie_bracket(&x, &y).unwrap()).unwrap();
            for _ in 0..20 {
                let p = ChartPoint::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                let v = j.eval(&mut Evaluator::new(&p)).unwrap();
                assert!(v.iter().all(|c| c.abs() < 1e-9), "{v:?}");
            }
        }
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (x, y) = (random_field(&mut rng), random_field(&mut rng));
        let s = &lie_bracket(&x, &y).unwrap() + &lie_bracket(&y, &x).unwrap();
        let p = ChartPoint::new(0.5, -0.2, 0.9, 0.1);
        assert!(s.eval(&mut Evaluator::new(&p)).unwrap().iter().all(|c| c.abs() < 1e-14));
    }
}
