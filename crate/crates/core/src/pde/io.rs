use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{GridSolution, OrderEstimate, PdeError};

/// Node values on a uniform rectangular grid, row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCsv {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

fn axis(mut v: Vec<f64>, name: &str) -> Result<Vec<f64>, PdeError> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    if v.len() < 3 {
        return Err(PdeError::Invalid(format!("{name} axis has {} distinct values, need 3", v.len())));
    }
    let h = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
    for (k, x) in v.iter().enumerate() {
        if (x - (v[0] + k as f64 * h)).abs() > 1e-9 * (1.0 + h) {
            return Err(PdeError::Invalid(format!("{name} axis is not uniform near {x}")));
        }
    }
    Ok(v)
}

/// Read `x,y,value` rows (with a header; the third column may have any name)
/// describing every node of a uniform grid, in any order.
pub fn read_grid_csv<R: Read>(reader: R) -> Result<GridCsv, PdeError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| PdeError::Io(e.to_string()))?;
        if rec.len() != 3 {
            return Err(PdeError::Invalid(format!("expected 3 columns, got {}", rec.len())));
        }
        let mut vals = [0.0; 3];
        for (k, v) in vals.iter_mut().enumerate() {
            *v = rec[k]
                .parse()
                .map_err(|_| PdeError::Invalid(format!("bad number {:?} in row {}", &rec[k], rows.len() + 1)))?;
        }
        rows.push(vals);
    }
    let xs = axis(rows.iter().map(|r| r[0]).collect(), "x")?;
    let ys = axis(rows.iter().map(|r| r[1]).collect(), "y")?;
    let (nx, ny) = (xs.len(), ys.len());
    if rows.len() != nx * ny {
        return Err(PdeError::Invalid(format!("{} rows for a {nx}×{ny} grid", rows.len())));
    }
    let (hx, hy) = ((xs[nx - 1] - xs[0]) / (nx - 1) as f64, (ys[ny - 1] - ys[0]) / (ny - 1) as f64);
    let mut values = vec![f64::NAN; nx * ny];
    for r in &rows {
        let i = ((r[0] - xs[0]) / hx).round() as usize;
        let j = ((r[1] - ys[0]) / hy).round() as usize;
        let slot = &mut values[j * nx + i];
        if !slot.is_nan() {
            return Err(PdeError::Invalid(format!("duplicate node ({}, {})", r[0], r[1])));
        }
        *slot = r[2];
    }
    Ok(GridCsv {
        x: (xs[0], xs[nx - 1]),
        y: (ys[0], ys[ny - 1]),
        nx,
        ny,
        values,
    })
}

/// Write `x,y,u` rows.
pub fn write_solution_csv<W: Write>(sol: &GridSolution, writer: W) -> Result<(), PdeError> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| PdeError::Io(e.to_string());
    w.write_record(["x", "y", "u"]).map_err(io)?;
    for j in 0..sol.ny {
        for i in 0..sol.nx {
            let (x, y) = sol.node(i, j);
            w.serialize((x, y, sol.u[j * sol.nx + i])).map_err(io)?;
        }
    }
    w.flush().map_err(|e| PdeError::Io(e.to_string()))
}

/// One solve of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub nx: usize,
    pub ny: usize,
    pub converged: bool,
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

impl SolveRecord {
    pub fn from_solution(sol: &GridSolution) -> SolveRecord {
        SolveRecord {
            nx: sol.nx,
            ny: sol.ny,
            converged: true,
            residual: sol.residual,
            iterations: sol.iterations,
            history: sol.history.clone(),
        }
    }
}

/// Summary of a sequence of solves, serialized as JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub family: String,
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    pub solves: Vec<SolveRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orders: Vec<OrderEstimate>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
