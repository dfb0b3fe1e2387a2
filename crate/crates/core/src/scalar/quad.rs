//! Adaptive Gauss–Legendre quadrature for line-integral leaves.

use std::sync::OnceLock;

use super::FieldError;

const ORDER: usize = 16;
const MAX_DEPTH: u32 = 24;
const REL_TOL: f64 = 1e-14;

/// Nodes and weights on [-1, 1], computed once by Newton iteration on P_n.
fn rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn panel<F>(f: &mut F, a: f64, b: f64) -> Result<f64, FieldError>
where
    F: FnMut(f64) -> Result<f64, FieldError>,
{
    let (nodes, weights) = rule();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x)?;
    }
    Ok(acc * half)
}

fn adapt<F>(f: &mut F, a: f64, b: f64, whole: f64, depth: u32) -> Result<f64, FieldError>
where
    F: FnMut(f64) -> Result<f64, FieldError>,
{
    let m = 0.5 * (a + b);
    let left = panel(f, a, m)?;
    let right = panel(f, m, b)?;
    let refined = left + right;
    if depth >= MAX_DEPTH || (refined - whole).abs() <= REL_TOL * refined.abs().max(1.0) {
        return Ok(refined);
    }
    Ok(adapt(f, a, m, left, depth + 1)? + adapt(f, m, b, right, depth + 1)?)
}

/// `∫_a^b f(s) ds`; a reversed interval gives the negated integral.
pub(crate) fn integrate<F>(mut f: F, a: f64, b: f64) -> Result<f64, FieldError>
where
    F: FnMut(f64) -> Result<f64, FieldError>,
{
    if a == b {
        return Ok(0.0);
    }
    let whole = panel(&mut f, a, b)?;
    adapt(&mut f, a, b, whole, 0)
}
