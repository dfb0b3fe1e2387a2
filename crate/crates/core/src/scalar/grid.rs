//! C² tensor-product cubic spline on a uniform `(x, y)` grid.
//!
//! Node slopes `f_x`, `f_y` and the twist `f_xy` come from one-dimensional
//! not-a-knot splines along rows and columns; each cell is then the bicubic
//! Hermite patch with that corner data, which reproduces the tensor-product
//! spline exactly.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridData {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    fx: Vec<f64>,
    fy: Vec<f64>,
    fxy: Vec<f64>,
}

/// Slopes of the not-a-knot cubic spline through equally spaced samples.
fn spline_slopes(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    debug_assert!(n >= 3);
    if n == 3 {
        // The not-a-knot spline through three points is the interpolating parabola.
        return vec![
            (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h),
            (f[2] - f[0]) / (2.0 * h),
            (f[0] - 4.0 * f[1] + 3.0 * f[2]) / (2.0 * h),
        ];
    }
    let mut sub = vec![1.0; n];
    let mut diag = vec![4.0; n];
    let mut sup = vec![1.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = 1.0;
    sup[0] = 2.0;
    rhs[0] = (-5.0 * f[0] + 4.0 * f[1] + f[2]) / (2.0 * h);
    for i in 1..n - 1 {
        rhs[i] = 3.0 * (f[i + 1] - f[i - 1]) / h;
    }
    sub[n - 1] = 2.0;
    diag[n - 1] = 1.0;
    rhs[n - 1] = (5.0 * f[n - 1] - 4.0 * f[n - 2] - f[n - 3]) / (2.0 * h);
    // Thomas algorithm
    for i in 1..n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
    }
    m
}

/// Cubic Hermite basis (value slot, slope slot) for both cell ends, and
/// their derivatives in the local variable `s ∈ [0, 1]`.
fn hermite(s: f64, order: u8) -> [f64; 4] {
    let (s2, s3) = (s * s, s * s * s);
    match order {
        0 => [
            2.0 * s3 - 3.0 * s2 + 1.0,
            s3 - 2.0 * s2 + s,
            -2.0 * s3 + 3.0 * s2,
            s3 - s2,
        ],
        1 => [
            6.0 * s2 - 6.0 * s,
            3.0 * s2 - 4.0 * s + 1.0,
            -6.0 * s2 + 6.0 * s,
            3.0 * s2 - 2.0 * s,
        ],
        2 => [12.0 * s - 6.0, 6.0 * s - 4.0, -12.0 * s + 6.0, 6.0 * s - 2.0],
        _ => [0.0; 4],
    }
}

impl GridData {
    /// `values[j * nx + i]` is the sample at `(x0 + i*hx, y0 + j*hy)`.
    pub fn new(
        (x0, x1): (f64, f64),
        (y0, y1): (f64, f64),
        nx: usize,
        ny: usize,
        values: Vec<f64>,
    ) -> Result<GridData, String> {
        if nx < 3 || ny < 3 {
            return Err(format!("grid needs at least 3x3 nodes, got {nx}x{ny}"));
        }
        if values.len() != nx * ny {
            return Err(format!(
                "grid has {} samples, expected {nx}x{ny}",
                values.len()
            ));
        }
        if !(x1 > x0 && y1 > y0) {
            return Err("grid rectangle is empty".into());
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err("grid contains non-finite samples".into());
        }
        let hx = (x1 - x0) / (nx - 1) as f64;
        let hy = (y1 - y0) / (ny - 1) as f64;
        let mut fx = vec![0.0; nx * ny];
        for j in 0..ny {
            let row = &values[j * nx..(j + 1) * nx];
            fx[j * nx..(j + 1) * nx].copy_from_slice(&spline_slopes(row, hx));
        }
        let column = |data: &[f64], i: usize| -> Vec<f64> { (0..ny).map(|j| data[j * nx + i]).collect() };
        let mut fy = vec![0.0; nx * ny];
        let mut fxy = vec![0.0; nx * ny];
        for i in 0..nx {
            let sy = spline_slopes(&column(&values, i), hy);
            let sxy = spline_slopes(&column(&fx, i), hy);
            for j in 0..ny {
                fy[j * nx + i] = sy[j];
                fxy[j * nx + i] = sxy[j];
            }
        }
        Ok(GridData {
            x0,
            x1,
            y0,
            y1,
            nx,
            ny,
            values,
            fx,
            fy,
            fxy,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x0, self.x1)
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.y0, self.y1)
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.x1 - self.x0) / (self.nx - 1) as f64,
            (self.y1 - self.y0) / (self.ny - 1) as f64,
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn locate(v: f64, lo: f64, h: f64, n: usize) -> (usize, f64) {
        let r = (v - lo) / h;
        let cell = (r.floor().max(0.0) as usize).min(n - 2);
        (cell, r - cell as f64)
    }

    /// Value of `∂x^dx ∂y^dy` of the interpolant; errors outside the rectangle.
    pub fn eval(&self, x: f64, y: f64, dx: u8, dy: u8) -> Result<f64, String> {
        let slack = 1e-12 * (1.0 + self.x1.abs().max(self.y1.abs()));
        if x < self.x0 - slack || x > self.x1 + slack || y < self.y0 - slack || y > self.y1 + slack {
            return Err(format!("point ({x}, {y}) lies outside the grid"));
        }
        let (hx, hy) = self.spacing();
        let (i, s) = Self::locate(x, self.x0, hx, self.nx);
        let (j, r) = Self::locate(y, self.y0, hy, self.ny);
        let bx = hermite(s, dx);
        let by = hermite(r, dy);
        let mut acc = 0.0;
        for (a, di) in [(0usize, 0usize), (1, 1)] {
            for (b, dj) in [(0usize, 0usize), (1, 1)] {
                let k = (j + dj) * self.nx + (i + di);
                let (vx, sx) = (bx[2 * a], bx[2 * a + 1] * hx);
                let (vy, sy) = (by[2 * b], by[2 * b + 1] * hy);
                acc += self.values[k] * vx * vy
                    + self.fx[k] * sx * vy
                    + self.fy[k] * vx * sy
                    + self.fxy[k] * sx * sy;
            }
        }
        Ok(acc / hx.powi(dx as i32) / hy.powi(dy as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64, f64) -> f64, n: usize) -> GridData {
        let mut v = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let x = i as f64 / (n - 1) as f64;
                let y = j as f64 / (n - 1) as f64;
                v.push(f(x, y));
            }
        }
        GridData::new((0.0, 1.0), (0.0, 1.0), n, n, v).unwrap()
    }

    #[test]
    fn reproduces_bicubic_polynomials_exactly() {
        let g = sample(|x, y| x * x * x * y + 2.0 * y * y - x * y * y * y, 7);
        let (x, y) = (0.37, 0.81);
        let tol = 1e-11;
        assert!((g.eval(x, y, 0, 0).unwrap() - (x * x * x * y + 2.0 * y * y - x * y * y * y)).abs() < tol);
        assert!((g.eval(x, y, 1, 0).unwrap() - (3.0 * x * x * y - y * y * y)).abs() < tol);
        assert!((g.eval(x, y, 0, 2).unwrap() - (4.0 - 6.0 * x * y)).abs() < tol);
        assert!((g.eval(x, y, 1, 1).unwrap() - (3.0 * x * x - 3.0 * y * y)).abs() < tol);
        assert!((g.eval(x, y, 2, 0).unwrap() - 6.0 * x * y).abs() < tol);
    }

    #[test]
    fn second_derivatives_are_continuous_across_cells() {
        let g = sample(|x, y| (3.0 * x).sin() * (2.0 * y).exp(), 9);
        let knot = 0.5;
        let below = g.eval(knot - 1e-10, 0.3, 2, 0).unwrap();
        let above = g.eval(knot + 1e-10, 0.3, 2, 0).unwrap();
        assert!((below - above).abs() < 1e-6);
    }

    #[test]
    fn outside_is_an_error() {
        let g = sample(|x, _| x, 4);
        assert!(g.eval(1.5, 0.5, 0, 0).is_err());
    }
}
