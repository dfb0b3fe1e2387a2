use gcalabi::scalar::{ChartPoint, Evaluator, ScalarField};
use gcalabi::surfaces::SurfaceModel;
use gcalabi::verify::Verifier;

use crate::CliError;

const COORDS: [&str; 4] = ["x", "y", "z", "t"];

enum Field {
    Scalar(ScalarField),
    Tau,
    Ricci(usize, usize),
    WPlus(usize),
}

/// Every field name `sample` accepts for `model`.
pub fn available(model: &SurfaceModel) -> Vec<String> {
    let mut names: Vec<String> = ["alpha", "beta", "A", "f", "h"].iter().map(|s| s.to_string()).collect();
    if model.big_h().is_some() {
        names.push("H".into());
    }
    names.push("tau".into());
    for i in 1..=4 {
        for j in i..=4 {
            names.push(format!("ricci_{i}{j}"));
        }
    }
    names.extend((1..=3).map(|k| format!("wplus_{k}")));
    for i in 1..=4 {
        for c in COORDS {
            names.push(format!("theta{i}_d{c}"));
        }
    }
    names
}

fn lookup(model: &SurfaceModel, name: &str) -> Option<Field> {
    let scalar = |f: &ScalarField| Some(Field::Scalar(f.clone()));
    match name {
        "alpha" => return scalar(model.alpha()),
        "beta" => return scalar(model.beta()),
        "A" => return scalar(model.primitive()),
        "f" => return scalar(model.conformal_factor()),
        "h" => return scalar(model.h()),
        "H" => return model.big_h().and_then(scalar),
        "tau" => return Some(Field::Tau),
        _ => {}
    }
    let digit = |c: u8| (b'1'..=b'4').contains(&c).then(|| (c - b'1') as usize);
    if let Some(ij) = name.strip_prefix("ricci_") {
        let b = ij.as_bytes();
        if b.len() == 2 {
            let (i, j) = (digit(b[0])?, digit(b[1])?);
            return (i <= j).then_some(Field::Ricci(i, j));
        }
        return None;
    }
    if let Some(k) = name.strip_prefix("wplus_") {
        return match k {
            "1" | "2" | "3" => Some(Field::WPlus(k.parse::<usize>().ok()? - 1)),
            _ => None,
        };
    }
    let rest = name.strip_prefix("theta")?;
    let (i, c) = rest.split_once("_d")?;
    let i = digit(*i.as_bytes().first().filter(|_| i.len() == 1)?)?;
    let c = COORDS.iter().position(|n| *n == c)?;
    Some(Field::Scalar(model.frame().theta(i).coeff(1 << c)))
}

/// Values of `names` at each point, row by row.
pub fn sample(model: &SurfaceModel, names: &[String], points: &[ChartPoint]) -> Result<Vec<Vec<f64>>, CliError> {
    let fields: Vec<Field> = names
        .iter()
        .map(|n| {
            lookup(model, n).ok_or_else(|| {
                CliError::Usage(format!("unknown field `{n}`; available: {}", available(model).join(", ")))
            })
        })
        .collect::<Result<_, _>>()?;
    let curvature_needed = fields.iter().any(|f| !matches!(f, Field::Scalar(_)));
    let v = Verifier::new(model);
    let curv = if curvature_needed {
        Some(v.curvature().map_err(|e| CliError::Check(format!("curvature unavailable: {e}")))?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        let mut ev = Evaluator::new(p);
        let data = match curv {
            Some(c) => Some(c.at_with(&mut ev).map_err(|e| CliError::Check(format!("at {:?}: {e}", p.coords)))?),
            None => None,
        };
        let mut row = Vec::with_capacity(fields.len());
        for f in &fields {
            let value = match (f, &data) {
                (Field::Scalar(s), _) => ev.eval(s).map_err(|e| CliError::Check(format!("at {:?}: {e}", p.coords)))?,
                (Field::Tau, Some(d)) => d.tau,
                (Field::Ricci(i, j), Some(d)) => d.ricci[*i][*j],
                (Field::WPlus(k), Some(d)) => d.w_plus_eigenvalues()[*k],
                _ => unreachable!("curvature evaluated when needed"),
            };
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}
