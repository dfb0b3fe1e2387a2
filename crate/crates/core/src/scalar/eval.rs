use std::collections::{BTreeMap, HashMap};
use std::hash::{BuildHasherDefault, Hasher};

use serde::{Deserialize, Serialize};

use super::{quad, Coord, FieldError, Func, Node, ScalarField};

/// A point of the chart together with the values of named parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub coords: [f64; 4],
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl ChartPoint {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        ChartPoint {
            coords: [x, y, z, t],
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn get(&self, c: Coord) -> f64 {
        self.coords[c.index()]
    }

    pub fn with_coord(&self, c: Coord, v: f64) -> Self {
        let mut p = self.clone();
        p.coords[c.index()] = v;
        p
    }
}

/// Identity hash for node addresses.
#[derive(Default)]
struct PtrHasher(u64);

impl Hasher for PtrHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, _: &[u8]) {
        unreachable!("only usize keys are hashed")
    }
    fn write_usize(&mut self, n: usize) {
        // Node addresses are 8-aligned; mix the high bits down.
        self.0 = (n as u64 >> 3).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }
}

/// Evaluates fields at one point, sharing values of common subexpressions
/// across every field evaluated through the same instance.
pub struct Evaluator<'p> {
    point: &'p ChartPoint,
    // The field is kept alive so its address cannot be reused while cached.
    cache: HashMap<usize, (f64, ScalarField), BuildHasherDefault<PtrHasher>>,
}

// |cos| below this at a tan node is treated as a pole.
const POLE_EPS: f64 = 1e-12;

impl<'p> Evaluator<'p> {
    pub fn new(point: &'p ChartPoint) -> Self {
        Evaluator {
            point,
            cache: HashMap::default(),
        }
    }

    pub fn point(&self) -> &ChartPoint {
        self.point
    }

    pub fn eval(&mut self, f: &ScalarField) -> Result<f64, FieldError> {
        if let Some(v) = f.as_constant() {
            return Ok(v);
        }
        let key = f.ptr_id();
        if let Some((v, _)) = self.cache.get(&key) {
            return Ok(*v);
        }
        let v = self.compute(f)?;
        self.cache.insert(key, (v, f.clone()));
        Ok(v)
    }

    pub fn eval_all(&mut self, fields: &[ScalarField]) -> Result<Vec<f64>, FieldError> {
        fields.iter().map(|f| self.eval(f)).collect()
    }

    fn compute(&mut self, f: &ScalarField) -> Result<f64, FieldError> {
        let v = match f.node() {
            Node::Coord(c) => self.point.get(*c),
            Node::Const(v) => *v,
            Node::Param(name) => *self
                .point
                .params
                .get(name.as_ref())
                .ok_or_else(|| FieldError::UnboundParameter(name.to_string()))?,
            Node::Add(a, b) => self.eval(a)? + self.eval(b)?,
            Node::Sub(a, b) => self.eval(a)? - self.eval(b)?,
            Node::Mul(a, b) => {
                let x = self.eval(a)?;
                if x == 0.0 {
                    // Still evaluate the other factor so domain errors surface.
                    self.eval(b)?;
                    0.0
                } else {
                    x * self.eval(b)?
                }
            }
            Node::Div(a, b) => {
                let num = self.eval(a)?;
                let den = self.eval(b)?;
                if den == 0.0 {
                    return Err(FieldError::domain(f, "division by zero"));
                }
                num / den
            }
            Node::Pow(a, b) => {
                let base = self.eval(a)?;
                let e = self.eval(b)?;
                if base < 0.0 && e.fract() != 0.0 {
                    return Err(FieldError::domain(f, "negative base with non-integer exponent"));
                }
                if base == 0.0 && e < 0.0 {
                    return Err(FieldError::domain(f, "zero base with negative exponent"));
                }
                base.powf(e)
            }
            Node::Neg(a) => -self.eval(a)?,
            Node::Func(func, a) => {
                let u = self.eval(a)?;
                match func {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Tan => {
                        if u.cos().abs() < POLE_EPS {
                            return Err(FieldError::domain(f, "pole of tan"));
                        }
                        u.tan()
                    }
                    Func::Sinh => u.sinh(),
                    Func::Cosh => u.cosh(),
                    Func::Tanh => u.tanh(),
                    Func::Exp => u.exp(),
                    Func::Ln => {
                        if u <= 0.0 {
                            return Err(FieldError::domain(f, "logarithm of a non-positive number"));
                        }
                        u.ln()
                    }
                    Func::Sqrt => {
                        if u < 0.0 {
                            return Err(FieldError::domain(f, "square root of a negative number"));
                        }
                        u.sqrt()
                    }
                }
            }
            Node::Grid(g) => g
                .data
                .eval(self.point.get(Coord::X), self.point.get(Coord::Y), g.dx, g.dy)
                .map_err(|reason| FieldError::domain(f, reason))?,
            Node::Integral(i) => {
                let upper = self.point.get(i.var);
                let base = self.point.clone();
                quad::integrate(
                    |s| i.integrand.eval(&base.with_coord(i.var, s)),
                    i.lower,
                    upper,
                )?
            }
        };
        if !v.is_finite() {
            return Err(FieldError::domain(f, "non-finite value"));
        }
        Ok(v)
    }
}

/// Outcome of a pointwise comparison of two fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumEqual {
    pub equal: bool,
    pub max_residual: f64,
}

/// Compare two fields on a sample set: `max |f - g| <= tol`.
pub fn num_equal(
    f: &ScalarField,
    g: &ScalarField,
    points: &[ChartPoint],
    tol: f64,
) -> Result<NumEqual, FieldError> {
    if points.is_empty() {
        return Err(FieldError::Usage("empty sample set".into()));
    }
    let mut max_residual: f64 = 0.0;
    for p in points {
        let mut ev = Evaluator::new(p);
        let r = (ev.eval(f)? - ev.eval(g)?).abs();
        max_residual = max_residual.max(r);
    }
    Ok(NumEqual {
        equal: max_residual <= tol,
        max_residual,
    })
}
