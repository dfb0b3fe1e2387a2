//! Finite-difference solver for `Δu = c₁h² + c₂e^{2u}` with `u = ln H` on a
//! rectangle, with Dirichlet data.
//!
//! The 5-point Laplacian is used on a uniform grid; Newton's method with
//! step halving handles the exponential term, and each linear step is a
//! sparse LU solve.

mod io;

use std::sync::Arc;

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{ChartPoint, FieldError, GridData, ScalarField};
use crate::surfaces::Family;

pub use io::{read_grid_csv, write_solution_csv, GridCsv, SolveRecord, SolveReport};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum PdeError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("Newton iteration did not converge in {iterations} steps (residual history {history:?})")]
    Divergence { iterations: usize, history: Vec<f64> },
    #[error("linear solve failed: {0}")]
    Singular(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Node values are stored row by row: `values[j * nx + i]` at
/// `(x₀ + i hx, y₀ + j hy)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridProblem {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub c1: f64,
    pub c2: f64,
    /// `h` at every node.
    pub h: Vec<f64>,
    /// Dirichlet values of `u`; only boundary nodes are read.
    pub boundary: Vec<f64>,
}

impl GridProblem {
    /// Sample `h` and the boundary data `u_b` on an `nx × ny` grid.
    pub fn from_fields(
        x: (f64, f64),
        y: (f64, f64),
        (nx, ny): (usize, usize),
        (c1, c2): (f64, f64),
        h: &ScalarField,
        boundary: &ScalarField,
    ) -> Result<GridProblem, PdeError> {
        let mut p = GridProblem {
            x,
            y,
            nx,
            ny,
            c1,
            c2,
            h: Vec::new(),
            boundary: Vec::new(),
        };
        p.check_shape()?;
        for j in 0..ny {
            for i in 0..nx {
                let (px, py) = p.node(i, j);
                let pt = ChartPoint::new(px, py, 0.0, 0.0);
                p.h.push(h.eval(&pt)?);
                let on_edge = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
                p.boundary.push(if on_edge { boundary.eval(&pt)? } else { 0.0 });
            }
        }
        p.validate()?;
        Ok(p)
    }

    /// Coefficients `(c₁, c₂)` of a generalized family with parameter `a`.
    pub fn coefficients(family: Family, a: f64) -> Result<(f64, f64), PdeError> {
        family
            .pde_coefficients(a)
            .ok_or_else(|| PdeError::Invalid("the calabi family has no H equation".into()))
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.x.1 - self.x.0) / (self.nx - 1) as f64,
            (self.y.1 - self.y.0) / (self.ny - 1) as f64,
        )
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let (hx, hy) = self.spacing();
        (self.x.0 + i as f64 * hx, self.y.0 + j as f64 * hy)
    }

    fn check_shape(&self) -> Result<(), PdeError> {
        if self.nx < 3 || self.ny < 3 {
            return Err(PdeError::Invalid(format!("grid {}×{} is smaller than 3×3", self.nx, self.ny)));
        }
        if !(self.x.1 > self.x.0 && self.y.1 > self.y.0) || !(self.x.0.is_finite() && self.y.1.is_finite()) {
            return Err(PdeError::Invalid(format!("bad rectangle {:?} × {:?}", self.x, self.y)));
        }
        if !(self.c1.is_finite() && self.c2.is_finite()) {
            return Err(PdeError::Invalid("coefficients must be finite".into()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        self.check_shape()?;
        let n = self.nx * self.ny;
        if self.h.len() != n || self.boundary.len() != n {
            return Err(PdeError::Invalid(format!(
                "expected {n} node values, got {} for h and {} for the boundary",
                self.h.len(),
                self.boundary.len()
            )));
        }
        if let Some(k) = self.h.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(PdeError::Invalid(format!("h = {} at node {k} is not positive", self.h[k])));
        }
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.is_boundary(i, j) && !self.boundary[j * self.nx + i].is_finite() {
                    return Err(PdeError::Invalid(format!("boundary value at node ({i}, {j}) is not finite")));
                }
            }
        }
        Ok(())
    }

    fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    /// Interior unknown index of node `(i, j)`.
    fn unknown(&self, i: usize, j: usize) -> usize {
        (j - 1) * (self.nx - 2) + (i - 1)
    }

    /// `Δ_h u − c₁h² − c₂e^{2u}` at interior nodes.
    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let (hx, hy) = self.spacing();
        let (ix2, iy2) = (1.0 / (hx * hx), 1.0 / (hy * hy));
        let nx = self.nx;
        let mut out = Vec::with_capacity((nx - 2) * (self.ny - 2));
        for j in 1..self.ny - 1 {
            for i in 1..nx - 1 {
                let k = j * nx + i;
                let lap = (u[k + 1] - 2.0 * u[k] + u[k - 1]) * ix2 + (u[k + nx] - 2.0 * u[k] + u[k - nx]) * iy2;
                out.push(lap - self.c1 * self.h[k] * self.h[k] - self.c2 * (2.0 * u[k]).exp());
            }
        }
        out
    }

    /// `Δ_h − diag(w)` on the interior unknowns.
    fn operator(&self, w: &[f64]) -> Result<SparseColMat<usize, f64>, PdeError> {
        let (hx, hy) = self.spacing();
        let (ix2, iy2) = (1.0 / (hx * hx), 1.0 / (hy * hy));
        let (nx, ny) = (self.nx, self.ny);
        let n = (nx - 2) * (ny - 2);
        let mut t = Vec::with_capacity(5 * n);
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let r = self.unknown(i, j);
                t.push(Triplet::new(r, r, -2.0 * (ix2 + iy2) - w[r]));
                for (ii, jj, c) in [(i - 1, j, ix2), (i + 1, j, ix2), (i, j - 1, iy2), (i, j + 1, iy2)] {
                    if !self.is_boundary(ii, jj) {
                        t.push(Triplet::new(r, self.unknown(ii, jj), c));
                    }
                }
            }
        }
        SparseColMat::try_new_from_triplets(n, n, &t).map_err(|e| PdeError::Singular(format!("{e:?}")))
    }

    fn solve_linear(&self, w: &[f64], rhs: &[f64]) -> Result<Vec<f64>, PdeError> {
        let a = self.operator(w)?;
        let lu = a.sp_lu().map_err(|e| PdeError::Singular(format!("{e:?}")))?;
        let b = Col::from_fn(rhs.len(), |i| rhs[i]);
        let x = lu.solve(&b);
        let out: Vec<f64> = (0..rhs.len()).map(|i| x[i]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(PdeError::Singular("non-finite solution of the Newton system".into()));
        }
        Ok(out)
    }

    /// Initial iterate: the pointwise root of `c₁h² + c₂e^{2u} = 0` when it
    /// exists, otherwise the harmonic extension of the boundary data.
    fn initial(&self) -> Result<Vec<f64>, PdeError> {
        let mut u = self.boundary.clone();
        let nx = self.nx;
        if self.c2 != 0.0 && self.c1 / self.c2 < 0.0 {
            for j in 1..self.ny - 1 {
                for i in 1..nx - 1 {
                    let k = j * nx + i;
                    u[k] = 0.5 * (-self.c1 * self.h[k] * self.h[k] / self.c2).ln();
                }
            }
            return Ok(u);
        }
        // Δ_h u = 0 with the boundary moved to the right-hand side
        let zeros = vec![0.0; (nx - 2) * (self.ny - 2)];
        for k in 0..u.len() {
            if !self.is_boundary(k % nx, k / nx) {
                u[k] = 0.0;
            }
        }
        let rhs: Vec<f64> = self.residual(&u).iter().map(|r| -r).collect();
        // residual(u) with zero interior includes the source; remove it
        let src: Vec<f64> = self.interior_source(&u);
        let rhs: Vec<f64> = rhs.iter().zip(&src).map(|(r, s)| r - s).collect();
        let v = self.solve_linear(&zeros, &rhs)?;
        self.scatter(&mut u, &v, 1.0);
        Ok(u)
    }

    /// `c₁h² + c₂e^{2u}` at interior nodes.
    fn interior_source(&self, u: &[f64]) -> Vec<f64> {
        let nx = self.nx;
        let mut out = Vec::new();
        for j in 1..self.ny - 1 {
            for i in 1..nx - 1 {
                let k = j * nx + i;
                out.push(self.c1 * self.h[k] * self.h[k] + self.c2 * (2.0 * u[k]).exp());
            }
        }
        out
    }

    fn scatter(&self, u: &mut [f64], v: &[f64], step: f64) {
        let nx = self.nx;
        for j in 1..self.ny - 1 {
            for i in 1..nx - 1 {
                u[j * nx + i] += step * v[self.unknown(i, j)];
            }
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSolution {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// `u` at every node, row by row.
    pub u: Vec<f64>,
    /// Max over interior nodes of `|Δ_h u − c₁h² − c₂e^{2u}|`.
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

impl GridSolution {
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let hx = (self.x.1 - self.x.0) / (self.nx - 1) as f64;
        let hy = (self.y.1 - self.y.0) / (self.ny - 1) as f64;
        (self.x.0 + i as f64 * hx, self.y.0 + j as f64 * hy)
    }

    pub fn spacing(&self) -> f64 {
        let hx = (self.x.1 - self.x.0) / (self.nx - 1) as f64;
        let hy = (self.y.1 - self.y.0) / (self.ny - 1) as f64;
        hx.max(hy)
    }

    /// `u` through its spline interpolant.
    pub fn log_profile(&self) -> Result<ScalarField, PdeError> {
        let data = GridData::new(self.x, self.y, self.nx, self.ny, self.u.clone()).map_err(PdeError::Invalid)?;
        Ok(ScalarField::grid(Arc::new(data)))
    }

    /// `H = e^u` through the spline interpolant of `e^u`.
    pub fn profile(&self) -> Result<ScalarField, PdeError> {
        let values = self.u.iter().map(|u| u.exp()).collect();
        let data = GridData::new(self.x, self.y, self.nx, self.ny, values).map_err(PdeError::Invalid)?;
        Ok(ScalarField::grid(Arc::new(data)))
    }
}

/// Smallest accepted Newton damping factor.
const MIN_STEP: f64 = 1.0 / 1024.0;

/// Damped Newton iteration on the 5-point discretization.
#[allow(non_snake_case)]
pub fn solve_logH(p: &GridProblem, tol: f64, max_iter: usize) -> Result<GridSolution, PdeError> {
    p.validate()?;
    if !(tol > 0.0) {
        return Err(PdeError::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let mut u = p.initial()?;
    let mut r = p.residual(&u);
    let mut norm = max_abs(&r);
    let mut history = vec![norm];
    let mut iterations = 0;
    while !(norm <= tol) {
        if iterations >= max_iter || !norm.is_finite() {
            return Err(PdeError::Divergence { iterations, history });
        }
        let nx = p.nx;
        let mut w = Vec::with_capacity(r.len());
        for j in 1..p.ny - 1 {
            for i in 1..nx - 1 {
                w.push(2.0 * p.c2 * (2.0 * u[j * nx + i]).exp());
            }
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = p.solve_linear(&w, &rhs)?;
        let mut step = 1.0;
        let (next, next_r, next_norm) = loop {
            let mut trial = u.clone();
            p.scatter(&mut trial, &delta, step);
            let tr = p.residual(&trial);
            let tn = max_abs(&tr);
            if tn < norm || step <= MIN_STEP {
                break (trial, tr, tn);
            }
            step *= 0.5;
        };
        u = next;
        r = next_r;
        norm = next_norm;
        history.push(norm);
        iterations += 1;
    }
    Ok(GridSolution {
        x: p.x,
        y: p.y,
        nx: p.nx,
        ny: p.ny,
        u,
        residual: norm,
        iterations,
        history,
    })
}

/// Observed order `log₂(e_N / e_{2N})` from max-norm errors at shared nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub n_coarse: usize,
    pub n_fine: usize,
    pub err_coarse: f64,
    pub err_fine: f64,
    /// `None` when both errors are at rounding level.
    pub order: Option<f64>,
    pub reliable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Errors below this are treated as rounding noise.
const NOISE: f64 = 1e-11;

/// Solve on `coarse` and on `fine` (with `2N − 1` nodes per side) and compare
/// both against `exact` at the coarse nodes.
pub fn convergence_order(
    coarse: &GridProblem,
    fine: &GridProblem,
    exact: impl Fn(f64, f64) -> f64,
    tol: f64,
    max_iter: usize,
) -> Result<OrderEstimate, PdeError> {
    let sc = solve_logH(coarse, tol, max_iter)?;
    let sf = solve_logH(fine, tol, max_iter)?;
    order_between(&sc, &sf, exact)
}

/// Observed order from two solutions, the second on the grid refined once.
pub fn order_between(
    coarse: &GridSolution,
    fine: &GridSolution,
    exact: impl Fn(f64, f64) -> f64,
) -> Result<OrderEstimate, PdeError> {
    if fine.nx != 2 * coarse.nx - 1 || fine.ny != 2 * coarse.ny - 1 || fine.x != coarse.x || fine.y != coarse.y {
        return Err(PdeError::Invalid("the fine grid must halve the coarse spacing on the same rectangle".into()));
    }
    let (mut ec, mut ef) = (0.0f64, 0.0f64);
    for j in 0..coarse.ny {
        for i in 0..coarse.nx {
            let (x, y) = coarse.node(i, j);
            let e = exact(x, y);
            ec = ec.max((coarse.u[j * coarse.nx + i] - e).abs());
            ef = ef.max((fine.u[2 * j * fine.nx + 2 * i] - e).abs());
        }
    }
    let n = coarse.nx.min(coarse.ny);
    let (order, mut note) = if ec < NOISE && ef < NOISE {
        (None, Some("errors at rounding level; order not applicable".to_string()))
    } else {
        (Some((ec / ef).log2()), None)
    };
    let reliable = order.is_some() && n >= 9;
    if order.is_some() && !reliable {
        note = Some(format!("grid with {n} nodes per side is too coarse for a reliable estimate"));
    }
    Ok(OrderEstimate {
        n_coarse: coarse.nx,
        n_fine: fine.nx,
        err_coarse: ec,
        err_fine: ef,
        order,
        reliable,
        note,
    })
}
