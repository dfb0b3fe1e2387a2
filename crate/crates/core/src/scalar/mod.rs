//! Closed-form scalar fields over the chart `(x, y, z, t)`.
//!
//! A [`ScalarField`] is an immutable expression DAG. Nodes are shared through
//! `Arc`, so cloning a field is cheap and subexpressions reused by several
//! fields are stored once. Partial derivatives are computed by the usual
//! rules and cached on the node, which keeps repeated differentiation (as in
//! `d` of a connection form) linear in the size of the DAG instead of
//! exponential.
//!
//! No algebraic simplification is attempted beyond constant folding and the
//! trivial identities `0 + a`, `1 * a`, `0 * a`. All identity checks in this
//! crate are numeric.

mod eval;
mod grid;
mod parse;
mod quad;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{num_equal, ChartPoint, Evaluator, NumEqual};
pub use grid::GridData;
pub use parse::{parse_expr, ParseError};

/// One of the four chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coord {
    X,
    Y,
    Z,
    T,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::X, Coord::Y, Coord::Z, Coord::T];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Coord {
        Coord::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::X => "x",
            Coord::Y => "y",
            Coord::Z => "z",
            Coord::T => "t",
        }
    }

    fn bit(self) -> u8 {
        1 << self.index()
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Elementary functions available as expression nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FieldError {
    #[error("derivative of order {order} requested from a grid-backed leaf (at most 2 supported)")]
    UnsupportedOrder { order: u8 },
    #[error("domain error ({reason}) in `{expr}`")]
    Domain { expr: String, reason: String },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("usage error: {0}")]
    Usage(String),
}

impl FieldError {
    pub(crate) fn domain(field: &ScalarField, reason: impl Into<String>) -> Self {
        let mut expr = field.to_string();
        if expr.len() > 240 {
            let mut cut = 240;
            while !expr.is_char_boundary(cut) {
                cut -= 1;
            }
            expr.truncate(cut);
            expr.push_str("...");
        }
        FieldError::Domain {
            expr,
            reason: reason.into(),
        }
    }
}

/// A grid-backed leaf: the `(dx, dy)` partial derivative of a spline
/// interpolant on a uniform `(x, y)` grid.
#[derive(Clone, Debug)]
pub struct GridLeaf {
    pub(crate) data: Arc<GridData>,
    pub(crate) dx: u8,
    pub(crate) dy: u8,
}

/// `∫_{lower}^{p[var]} integrand(p with var = s) ds`, evaluated by adaptive
/// Gauss–Legendre quadrature. Its derivative along `var` is the integrand;
/// along any other coordinate it is the integral of the integrand's partial.
#[derive(Clone, Debug)]
pub struct Integral {
    pub(crate) integrand: ScalarField,
    pub(crate) var: Coord,
    pub(crate) lower: f64,
}

#[derive(Clone, Debug)]
pub(crate) enum Node {
    Coord(Coord),
    Const(f64),
    Param(Arc<str>),
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Div(ScalarField, ScalarField),
    Pow(ScalarField, ScalarField),
    Neg(ScalarField),
    Func(Func, ScalarField),
    Grid(GridLeaf),
    Integral(Integral),
}

struct Inner {
    node: Node,
    deps: u8,
    derivs: [OnceLock<Result<ScalarField, FieldError>>; 4],
}

impl fmt::Debug for Inner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.node.fmt(f)
    }
}

/// Immutable closed-form scalar field on the chart.
#[derive(Clone, Debug)]
pub struct ScalarField(Arc<Inner>);

impl ScalarField {
    fn from_node(node: Node) -> ScalarField {
        let deps = match &node {
            Node::Coord(c) => c.bit(),
            Node::Const(_) | Node::Param(_) => 0,
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => a.0.deps | b.0.deps,
            Node::Neg(a) | Node::Func(_, a) => a.0.deps,
            Node::Grid(_) => Coord::X.bit() | Coord::Y.bit(),
            Node::Integral(i) => i.integrand.0.deps | i.var.bit(),
        };
        ScalarField(Arc::new(Inner {
            node,
            deps,
            derivs: Default::default(),
        }))
    }

    pub(crate) fn node(&self) -> &Node {
        &self.0.node
    }

    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(v: f64) -> ScalarField {
        ScalarField::from_node(Node::Const(v))
    }

    pub fn zero() -> ScalarField {
        ScalarField::constant(0.0)
    }

    pub fn one() -> ScalarField {
        ScalarField::constant(1.0)
    }

    pub fn coord(c: Coord) -> ScalarField {
        ScalarField::from_node(Node::Coord(c))
    }

    pub fn x() -> ScalarField {
        ScalarField::coord(Coord::X)
    }

    pub fn y() -> ScalarField {
        ScalarField::coord(Coord::Y)
    }

    pub fn z() -> ScalarField {
        ScalarField::coord(Coord::Z)
    }

    pub fn t() -> ScalarField {
        ScalarField::coord(Coord::T)
    }

    /// A named real parameter, bound at evaluation time through [`ChartPoint`].
    pub fn param(name: &str) -> ScalarField {
        ScalarField::from_node(Node::Param(Arc::from(name)))
    }

    /// Grid-backed function of `(x, y)`.
    pub fn grid(data: Arc<GridData>) -> ScalarField {
        ScalarField::from_node(Node::Grid(GridLeaf { data, dx: 0, dy: 0 }))
    }

    /// `∫_{lower}^{var} integrand ds` along one coordinate axis.
    pub fn integral(integrand: ScalarField, var: Coord, lower: f64) -> ScalarField {
        if integrand.is_zero() {
            return ScalarField::zero();
        }
        ScalarField::from_node(Node::Integral(Integral {
            integrand,
            var,
            lower,
        }))
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.node() {
            Node::Const(v) => Some(*v),
            _ => None,
        }
    }

    /// True when the field is the literal constant zero (after folding).
    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    /// Whether the field can depend on coordinate `c`.
    pub fn depends_on(&self, c: Coord) -> bool {
        self.0.deps & c.bit() != 0
    }

    /// Whether any grid-backed leaf occurs in the field.
    pub fn has_grid_leaf(&self) -> bool {
        self.contains(|n| matches!(n, Node::Grid(_)))
    }

    /// Largest node spacing among the grid-backed leaves, if there are any.
    pub fn grid_spacing(&self) -> Option<f64> {
        match self.node() {
            Node::Grid(g) => {
                let (hx, hy) = g.data.spacing();
                Some(hx.max(hy))
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                match (a.grid_spacing(), b.grid_spacing()) {
                    (Some(u), Some(v)) => Some(u.max(v)),
                    (u, v) => u.or(v),
                }
            }
            Node::Neg(a) | Node::Func(_, a) => a.grid_spacing(),
            Node::Integral(i) => i.integrand.grid_spacing(),
            _ => None,
        }
    }

    fn contains(&self, pred: impl Fn(&Node) -> bool + Copy) -> bool {
        if pred(self.node()) {
            return true;
        }
        match self.node() {
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => a.contains(pred) || b.contains(pred),
            Node::Neg(a) | Node::Func(_, a) => a.contains(pred),
            Node::Integral(i) => i.integrand.contains(pred),
            _ => false,
        }
    }

    pub fn apply(&self, func: Func) -> ScalarField {
        if let Some(v) = self.as_constant() {
            // Fold only where the value is finite and the function is total here.
            let folded = match func {
                Func::Sin => Some(v.sin()),
                Func::Cos => Some(v.cos()),
                Func::Sinh => Some(v.sinh()),
                Func::Cosh => Some(v.cosh()),
                Func::Tanh => Some(v.tanh()),
                Func::Exp => Some(v.exp()),
                Func::Ln if v > 0.0 => Some(v.ln()),
                Func::Sqrt if v >= 0.0 => Some(v.sqrt()),
                _ => None,
            };
            if let Some(r) = folded.filter(|r| r.is_finite()) {
                return ScalarField::constant(r);
            }
        }
        if let (Func::Ln, Node::Func(Func::Exp, inner)) = (func, self.node()) {
            return inner.clone();
        }
        ScalarField::from_node(Node::Func(func, self.clone()))
    }

    pub fn sin(&self) -> ScalarField {
        self.apply(Func::Sin)
    }
    pub fn cos(&self) -> ScalarField {
        self.apply(Func::Cos)
    }
    pub fn tan(&self) -> ScalarField {
        self.apply(Func::Tan)
    }
    pub fn sinh(&self) -> ScalarField {
        self.apply(Func::Sinh)
    }
    pub fn cosh(&self) -> ScalarField {
        self.apply(Func::Cosh)
    }
    pub fn tanh(&self) -> ScalarField {
        self.apply(Func::Tanh)
    }
    pub fn exp(&self) -> ScalarField {
        self.apply(Func::Exp)
    }
    pub fn ln(&self) -> ScalarField {
        self.apply(Func::Ln)
    }
    pub fn sqrt(&self) -> ScalarField {
        self.apply(Func::Sqrt)
    }

    pub fn powf(&self, exponent: f64) -> ScalarField {
        self.pow(&ScalarField::constant(exponent))
    }

    pub fn pow(&self, exponent: &ScalarField) -> ScalarField {
        match (self.as_constant(), exponent.as_constant()) {
            (_, Some(e)) if e == 0.0 => return ScalarField::one(),
            (_, Some(e)) if e == 1.0 => return self.clone(),
            (Some(b), Some(e)) => {
                let r = b.powf(e);
                if r.is_finite() {
                    return ScalarField::constant(r);
                }
            }
            _ => {}
        }
        ScalarField::from_node(Node::Pow(self.clone(), exponent.clone()))
    }

    pub fn square(&self) -> ScalarField {
        self * self
    }

    /// Exact partial derivative along `c`.
    ///
    /// Results are cached on the node, so differentiating a shared
    /// subexpression twice costs nothing the second time.
    pub fn partial(&self, c: Coord) -> Result<ScalarField, FieldError> {
        if !self.depends_on(c) {
            return Ok(ScalarField::zero());
        }
        self.0.derivs[c.index()]
            .get_or_init(|| self.compute_partial(c))
            .clone()
    }

    fn compute_partial(&self, c: Coord) -> Result<ScalarField, FieldError> {
        Ok(match self.node() {
            Node::Coord(v) => {
                if *v == c {
                    ScalarField::one()
                } else {
                    ScalarField::zero()
                }
            }
            Node::Const(_) | Node::Param(_) => ScalarField::zero(),
            Node::Add(a, b) => a.partial(c)? + b.partial(c)?,
            Node::Sub(a, b) => a.partial(c)? - b.partial(c)?,
            Node::Mul(a, b) => &a.partial(c)? * b + a * &b.partial(c)?,
            Node::Div(a, b) => {
                let da = a.partial(c)?;
                let db = b.partial(c)?;
                &da / b - &(a * &db) / &b.square()
            }
            Node::Pow(base, exp) => {
                let db = base.partial(c)?;
                match exp.as_constant() {
                    Some(e) => e * &(&base.powf(e - 1.0) * &db),
                    None => {
                        // Fresh node: a derivative must never point back at its own node.
                        let again = base.pow(exp);
                        let de = exp.partial(c)?;
                        &again * &(&(&de * &base.ln()) + &(&(exp * &db) / base))
                    }
                }
            }
            Node::Neg(a) => -a.partial(c)?,
            Node::Func(func, a) => {
                let da = a.partial(c)?;
                if da.is_zero() {
                    return Ok(ScalarField::zero());
                }
                let outer = match func {
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Tan => ScalarField::one() / a.cos().square(),
                    Func::Sinh => a.cosh(),
                    Func::Cosh => a.sinh(),
                    Func::Tanh => 1.0 - a.tanh().square(),
                    Func::Exp => a.exp(),
                    Func::Ln => ScalarField::one() / a,
                    Func::Sqrt => 0.5 / &a.sqrt(),
                };
                &outer * &da
            }
            Node::Grid(g) => {
                let (dx, dy) = match c {
                    Coord::X => (g.dx + 1, g.dy),
                    Coord::Y => (g.dx, g.dy + 1),
                    _ => return Ok(ScalarField::zero()),
                };
                if dx + dy > 2 {
                    return Err(FieldError::UnsupportedOrder { order: dx + dy });
                }
                ScalarField::from_node(Node::Grid(GridLeaf {
                    data: g.data.clone(),
                    dx,
                    dy,
                }))
            }
            Node::Integral(i) => {
                if i.var == c {
                    i.integrand.clone()
                } else {
                    ScalarField::integral(i.integrand.partial(c)?, i.var, i.lower)
                }
            }
        })
    }

    /// Directional derivative `Σ v_c ∂_c f` for coefficient fields `v`.
    pub fn directional(&self, v: &[ScalarField; 4]) -> Result<ScalarField, FieldError> {
        let mut acc = ScalarField::zero();
        for c in Coord::ALL {
            if v[c.index()].is_zero() {
                continue;
            }
            acc = acc + &v[c.index()] * &self.partial(c)?;
        }
        Ok(acc)
    }

    /// Replace every occurrence of coordinate `c` by `value`.
    ///
    /// Grid-backed leaves and integrals whose upper limit is `c` cannot be
    /// rewritten structurally and yield a usage error.
    pub fn substitute(&self, c: Coord, value: &ScalarField) -> Result<ScalarField, FieldError> {
        if !self.depends_on(c) {
            return Ok(self.clone());
        }
        Ok(match self.node() {
            Node::Coord(v) if *v == c => value.clone(),
            Node::Coord(_) | Node::Const(_) | Node::Param(_) => self.clone(),
            Node::Add(a, b) => a.substitute(c, value)? + b.substitute(c, value)?,
            Node::Sub(a, b) => a.substitute(c, value)? - b.substitute(c, value)?,
            Node::Mul(a, b) => a.substitute(c, value)? * b.substitute(c, value)?,
            Node::Div(a, b) => a.substitute(c, value)? / b.substitute(c, value)?,
            Node::Pow(a, b) => a.substitute(c, value)?.pow(&b.substitute(c, value)?),
            Node::Neg(a) => -a.substitute(c, value)?,
            Node::Func(func, a) => a.substitute(c, value)?.apply(*func),
            Node::Grid(_) => {
                return Err(FieldError::Usage(format!(
                    "cannot substitute `{c}` inside a grid-backed leaf"
                )))
            }
            Node::Integral(i) if i.var == c => {
                return Err(FieldError::Usage(format!(
                    "cannot substitute the integration variable `{c}`"
                )))
            }
            Node::Integral(i) => {
                ScalarField::integral(i.integrand.substitute(c, value)?, i.var, i.lower)
            }
        })
    }

    /// Replace named parameters by constants.
    pub fn bind(&self, params: &std::collections::BTreeMap<String, f64>) -> ScalarField {
        match self.node() {
            Node::Param(name) => match params.get(name.as_ref()) {
                Some(v) => ScalarField::constant(*v),
                None => self.clone(),
            },
            Node::Coord(_) | Node::Const(_) | Node::Grid(_) => self.clone(),
            Node::Add(a, b) => a.bind(params) + b.bind(params),
            Node::Sub(a, b) => a.bind(params) - b.bind(params),
            Node::Mul(a, b) => a.bind(params) * b.bind(params),
            Node::Div(a, b) => a.bind(params) / b.bind(params),
            Node::Pow(a, b) => a.bind(params).pow(&b.bind(params)),
            Node::Neg(a) => -a.bind(params),
            Node::Func(func, a) => a.bind(params).apply(*func),
            Node::Integral(i) => ScalarField::integral(i.integrand.bind(params), i.var, i.lower),
        }
    }

    /// Evaluate at a point. Equivalent to a fresh [`Evaluator`] per call.
    pub fn eval(&self, p: &ChartPoint) -> Result<f64, FieldError> {
        Evaluator::new(p).eval(self)
    }
}

impl From<f64> for ScalarField {
    fn from(v: f64) -> Self {
        ScalarField::constant(v)
    }
}

fn add_fields(a: &ScalarField, b: &ScalarField) -> ScalarField {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => ScalarField::constant(x + y),
        (Some(x), _) if x == 0.0 => b.clone(),
        (_, Some(y)) if y == 0.0 => a.clone(),
        _ => ScalarField::from_node(Node::Add(a.clone(), b.clone())),
    }
}

fn sub_fields(a: &ScalarField, b: &ScalarField) -> ScalarField {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => ScalarField::constant(x - y),
        (Some(x), _) if x == 0.0 => neg_field(b),
        (_, Some(y)) if y == 0.0 => a.clone(),
        _ => ScalarField::from_node(Node::Sub(a.clone(), b.clone())),
    }
}

fn mul_fields(a: &ScalarField, b: &ScalarField) -> ScalarField {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => ScalarField::constant(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => ScalarField::zero(),
        (Some(x), _) if x == 1.0 => b.clone(),
        (_, Some(y)) if y == 1.0 => a.clone(),
        (Some(x), _) if x == -1.0 => neg_field(b),
        (_, Some(y)) if y == -1.0 => neg_field(a),
        _ => ScalarField::from_node(Node::Mul(a.clone(), b.clone())),
    }
}

fn div_fields(a: &ScalarField, b: &ScalarField) -> ScalarField {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) if y != 0.0 => ScalarField::constant(x / y),
        (Some(x), _) if x == 0.0 && !b.is_zero() => ScalarField::zero(),
        (_, Some(y)) if y == 1.0 => a.clone(),
        _ => ScalarField::from_node(Node::Div(a.clone(), b.clone())),
    }
}

fn neg_field(a: &ScalarField) -> ScalarField {
    match a.node() {
        Node::Const(v) => ScalarField::constant(-v),
        Node::Neg(inner) => inner.clone(),
        _ => ScalarField::from_node(Node::Neg(a.clone())),
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                $imp(self, rhs)
            }
        }
        impl $trait<ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                $imp(&self, &rhs)
            }
        }
        impl $trait<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                $imp(&self, rhs)
            }
        }
        impl $trait<ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                $imp(self, &rhs)
            }
        }
        impl $trait<f64> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: f64) -> ScalarField {
                $imp(self, &ScalarField::constant(rhs))
            }
        }
        impl $trait<f64> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: f64) -> ScalarField {
                $imp(&self, &ScalarField::constant(rhs))
            }
        }
        impl $trait<&ScalarField> for f64 {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                $imp(&ScalarField::constant(self), rhs)
            }
        }
        impl $trait<ScalarField> for f64 {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                $imp(&ScalarField::constant(self), &rhs)
            }
        }
    };
}

field_binop!(Add, add, add_fields);
field_binop!(Sub, sub, sub_fields);
field_binop!(Mul, mul, mul_fields);
field_binop!(Div, div, div_fields);

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        neg_field(self)
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        neg_field(&self)
    }
}

impl std::iter::Sum for ScalarField {
    fn sum<I: Iterator<Item = ScalarField>>(iter: I) -> ScalarField {
        iter.fold(ScalarField::zero(), |acc, f| acc + f)
    }
}

// Binding strength used to decide where parentheses are needed when printing.
fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(_) => 3,
        Node::Pow(..) => 4,
        Node::Const(v) if *v < 0.0 => 3,
        _ => 5,
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, child: &ScalarField, min: u8| -> fmt::Result {
            if precedence(child.node()) < min {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        };
        match self.node() {
            Node::Coord(c) => write!(f, "{c}"),
            Node::Const(v) => write!(f, "{v}"),
            Node::Param(name) => write!(f, "{name}"),
            Node::Add(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" + ")?;
                wrap(f, b, 2)
            }
            Node::Sub(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" - ")?;
                wrap(f, b, 2)
            }
            Node::Mul(a, b) => {
                wrap(f, a, 2)?;
                f.write_str("*")?;
                wrap(f, b, 3)
            }
            Node::Div(a, b) => {
                wrap(f, a, 2)?;
                f.write_str("/")?;
                wrap(f, b, 3)
            }
            Node::Pow(a, b) => {
                wrap(f, a, 5)?;
                f.write_str("^")?;
                wrap(f, b, 4)
            }
            Node::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, 3)
            }
            Node::Func(func, a) => write!(f, "{}({a})", func.name()),
            Node::Grid(g) => {
                f.write_str("grid")?;
                if g.dx + g.dy > 0 {
                    write!(f, "_{}", "x".repeat(g.dx as usize) + &"y".repeat(g.dy as usize))?;
                }
                f.write_str("(x, y)")
            }
            Node::Integral(i) => write!(
                f,
                "int[{}..{}]({} d{})",
                i.lower, i.var, i.integrand, i.var
            ),
        }
    }
}
