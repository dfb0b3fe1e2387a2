use crate::exterior::Domain;
use crate::scalar::{ChartPoint, Coord, ScalarField};

use super::SurfaceError;

/// Points of a `side × side` lattice over the `(x, y)` rectangle of `domain`,
/// at the midpoint of its z- and t-ranges.
pub(crate) fn xy_lattice(domain: &Domain, side: usize) -> Vec<ChartPoint> {
    let at = |(lo, hi): (f64, f64), k: usize| lo + (hi - lo) * k as f64 / (side - 1).max(1) as f64;
    let z = 0.5 * (domain.z.0 + domain.z.1);
    let t = 0.5 * (domain.t.0 + domain.t.1);
    let mut pts = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            pts.push(ChartPoint::new(at(domain.x, i), at(domain.y, j), z, t));
        }
    }
    pts
}

/// Largest `|f|` over `points`, with the point where it occurs.
pub(crate) fn worst(f: &ScalarField, points: &[ChartPoint]) -> Result<(f64, [f64; 4]), SurfaceError> {
    let mut out = (0.0f64, [f64::NAN; 4]);
    for p in points {
        let v = f.eval(p)?.abs();
        if !(v <= out.0) {
            out = (v, p.coords);
        }
    }
    Ok(out)
}

/// A function `f(x, y)` with `∂x f = p` and `∂y f = q`, for a closed form
/// `p dx + q dy` on the rectangle of `domain`.
///
/// `f(x, y) = ∫₀ˣ p(s, 0) ds + ∫₀ʸ q(x, s) ds`, so `f(0, 0) = 0`.
pub fn potential_from_closed_form(
    p: &ScalarField,
    q: &ScalarField,
    domain: &Domain,
) -> Result<ScalarField, SurfaceError> {
    let defect = p.partial(Coord::Y)? - q.partial(Coord::X)?;
    let mut pts = xy_lattice(domain, 9);
    pts.extend(domain.sample(64, 0x5eed));
    let (max_residual, point) = worst(&defect, &pts)?;
    if max_residual > 1e-9 {
        return Err(SurfaceError::NotClosed { max_residual, point });
    }
    let along_x = ScalarField::integral(p.substitute(Coord::Y, &ScalarField::zero())?, Coord::X, 0.0);
    let along_y = ScalarField::integral(q.clone(), Coord::Y, 0.0);
    Ok(along_x + along_y)
}

/// One-form data `(l₂, n₂) = (0, ∫₀ˣ h²(s, y) ds)`, so that
/// `d(l₂ dx + n₂ dy) = h² dx∧dy`.
///
/// Fails when `h` vanishes on the sample lattice of `domain`.
pub fn volume_potential(h: &ScalarField, domain: &Domain) -> Result<(ScalarField, ScalarField), SurfaceError> {
    check_positive("h", h, domain)?;
    Ok((ScalarField::zero(), ScalarField::integral(h.square(), Coord::X, 0.0)))
}

pub(crate) fn check_positive(name: &str, f: &ScalarField, domain: &Domain) -> Result<(), SurfaceError> {
    for p in xy_lattice(domain, 17) {
        let v = f.eval(&p)?;
        if !(v > 0.0) {
            return Err(SurfaceError::NotPositive {
                name: name.to_string(),
                value: v,
                point: [p.coords[0], p.coords[1]],
            });
        }
    }
    Ok(())
}
