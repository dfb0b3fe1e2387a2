use std::fs;
use std::io::Write;
use std::path::Path;

use gcalabi::pde::{order_between, solve_logH, write_solution_csv, GridProblem, PdeError, SolveRecord, SolveReport};
use gcalabi::scalar::{ChartPoint, Coord};
use gcalabi::surfaces::{build, classify_alpha, AlphaKind, Branch, SurfaceError, SurfaceModel};
use gcalabi::verify::{run_suite_with, GRID_CONSTANT};

use crate::config::{BoundaryMode, RunConfig};
use crate::{fields, CliError};

/// Write `contents` to `path` through a temporary file in the same
/// directory, or to stdout when there is no path.
fn emit(path: Option<&Path>, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let Some(path) = path else {
        return std::io::stdout().write_all(contents).map_err(io);
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.persist(path).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

pub fn alpha(d: f64, branch: Option<&str>) -> Result<(), CliError> {
    let branch = branch
        .map(|b| b.parse::<Branch>())
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let p = classify_alpha(d, branch).map_err(|e| CliError::Usage(e.to_string()))?;
    let (lo, hi) = p.interval();
    println!("D = {d}");
    match p.kind() {
        AlphaKind::Tan(a) | AlphaKind::Coth(a) | AlphaKind::Tanh(a) => println!("a = {a}"),
        _ => {}
    }
    println!("α(z) = {}", p.alpha());
    println!("A(z) = {}", p.primitive());
    println!("β(z) = e^A/α = {}", p.calabi_beta());
    println!("valid for z in ({lo}, {hi})");
    if matches!(p.kind(), AlphaKind::SemiSymmetric) {
        println!("semi-symmetric: E₄ ln α = α/2 holds identically");
    }
    Ok(())
}

fn build_error(e: SurfaceError) -> CliError {
    match e {
        SurfaceError::Usage(m) => CliError::Config(m),
        other => CliError::Build(other.to_string()),
    }
}

fn build_model(cfg: &RunConfig) -> Result<(SurfaceModel, Option<f64>), CliError> {
    let (spec, relaxed) = cfg.spec(GRID_CONSTANT)?;
    let model = build(&spec).map_err(build_error)?;
    Ok((model, relaxed))
}

pub fn build_verify(path: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::load(path)?;
    let samples = cfg.samples()?;
    let (model, relaxed) = build_model(&cfg)?;
    if let Some(t) = relaxed {
        eprintln!("grid-backed input: build tolerance relaxed to {t:e}");
    }
    let report = run_suite_with(&model, samples, cfg.verify.seed, cfg.tol(), GRID_CONSTANT);
    let mut json = report.to_json();
    json.push('\n');
    emit(cfg.output.report.as_deref().map(|p| cfg.resolve(p)).as_deref(), json.as_bytes())?;
    for c in &report.checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        eprintln!("{verdict:4} {:18} {:.3e} (tol {:.1e})", c.name, c.max_residual, c.tolerance);
    }
    if report.pass {
        Ok(())
    } else {
        let names: Vec<String> = report
            .failing()
            .iter()
            .map(|c| {
                let comps = c.failing_components();
                if comps.is_empty() {
                    c.name.clone()
                } else {
                    format!("{} [{}]", c.name, comps.join(", "))
                }
            })
            .collect();
        Err(CliError::Check(format!("failing checks: {}", names.join("; "))))
    }
}

fn pde_error(e: PdeError) -> CliError {
    match e {
        PdeError::Invalid(m) => CliError::Config(m),
        PdeError::Io(m) => CliError::Io(m),
        other => CliError::Divergence(other.to_string()),
    }
}

pub fn pde(path: &Path, manufactured: bool) -> Result<(), CliError> {
    let cfg = RunConfig::load(path)?;
    let family = cfg.family()?;
    let pc = cfg.pde.as_ref().ok_or_else(|| CliError::Config("missing section [pde]".into()))?;
    let a = cfg.surface.a.ok_or_else(|| CliError::Config(format!("missing field surface.a for family {family}")))?;
    let (c1, c2) = GridProblem::coefficients(family, a).map_err(pde_error)?;
    let h = cfg.h()?;
    let exact_src = pc.u.as_deref();
    let boundary = match pc.boundary {
        BoundaryMode::Expr => cfg.expr(
            "pde.u",
            exact_src.ok_or_else(|| CliError::Config("missing field pde.u (boundary = \"expr\")".into()))?,
        )?,
        BoundaryMode::ConstantRoot => {
            if c2 == 0.0 || c1 / c2 >= 0.0 {
                return Err(CliError::Config(format!(
                    "family {family} has no constant root: c₁ = {c1}, c₂ = {c2} have the same sign"
                )));
            }
            0.5 * &((-c1 / c2) * &h.square()).ln()
        }
    };
    let exact = match (manufactured, exact_src) {
        (false, _) => None,
        (true, Some(s)) => Some(cfg.expr("pde.u", s)?),
        (true, None) => return Err(CliError::Config("--manufactured needs the exact solution in pde.u".into())),
    };
    if pc.n.is_empty() {
        return Err(CliError::Config("pde.n lists no grid sizes".into()));
    }
    let s = &cfg.surface;
    let mut report = SolveReport {
        family: family.to_string(),
        a,
        c1,
        c2,
        solves: Vec::new(),
        orders: Vec::new(),
    };
    let report_path = cfg.output.solve_report.as_deref().map(|p| cfg.resolve(p));
    let write_report = |r: &SolveReport| {
        let mut json = r.to_json();
        json.push('\n');
        emit(report_path.as_deref(), json.as_bytes())
    };
    let mut solutions = Vec::new();
    for &n in &pc.n {
        let p = GridProblem::from_fields((s.x[0], s.x[1]), (s.y[0], s.y[1]), (n, n), (c1, c2), &h, &boundary)
            .map_err(pde_error)?;
        match solve_logH(&p, pc.tol, pc.max_iter) {
            Ok(sol) => {
                eprintln!("N = {n}: {} Newton steps, residual {:.3e}", sol.iterations, sol.residual);
                report.solves.push(SolveRecord::from_solution(&sol));
                solutions.push(sol);
            }
            Err(PdeError::Divergence { iterations, history }) => {
                let residual = history.last().copied().unwrap_or(f64::NAN);
                report.solves.push(SolveRecord { nx: n, ny: n, converged: false, residual, iterations, history: history.clone() });
                write_report(&report)?;
                return Err(CliError::Divergence(format!(
                    "N = {n}: no convergence in {iterations} Newton steps, residual history {history:?}"
                )));
            }
            Err(e) => return Err(pde_error(e)),
        }
    }
    let mut bad_orders = Vec::new();
    if let Some(exact) = exact {
        let f = |x: f64, y: f64| exact.eval(&ChartPoint::new(x, y, 0.0, 0.0)).unwrap_or(f64::NAN);
        for pair in solutions.windows(2) {
            let est = order_between(&pair[0], &pair[1], f).map_err(pde_error)?;
            match est.order {
                Some(q) => {
                    eprintln!("order N = {} → {}: {q:.3} (errors {:.3e}, {:.3e})", est.n_coarse, est.n_fine, est.err_coarse, est.err_fine);
                    if est.reliable && (q - 2.0).abs() > 0.3 {
                        bad_orders.push(format!("{}→{}: {q:.3}", est.n_coarse, est.n_fine));
                    }
                }
                None => eprintln!("order N = {} → {}: not applicable", est.n_coarse, est.n_fine),
            }
            if let Some(note) = &est.note {
                eprintln!("  note: {note}");
            }
            report.orders.push(est);
        }
    }
    if let Some(sol_path) = &cfg.output.solution {
        let mut buf = Vec::new();
        write_solution_csv(solutions.last().expect("at least one solve"), &mut buf).map_err(pde_error)?;
        emit(Some(&cfg.resolve(sol_path)), &buf)?;
    }
    write_report(&report)?;
    if bad_orders.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("observed order outside 2 ± 0.3: {}", bad_orders.join(", "))))
    }
}

fn lattice(model: &SurfaceModel, counts: &[usize]) -> Result<Vec<ChartPoint>, CliError> {
    if counts.len() != 4 || counts.contains(&0) {
        return Err(CliError::Usage(format!("--grid needs four positive counts NX,NY,NZ,NT, got {counts:?}")));
    }
    let d = model.domain();
    let axis = |k: usize| -> Vec<f64> {
        let (lo, hi) = d.range(Coord::from_index(k));
        let n = counts[k];
        if n == 1 {
            vec![0.5 * (lo + hi)]
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
    };
    let (xs, ys, zs, ts) = (axis(0), axis(1), axis(2), axis(3));
    let mut pts = Vec::new();
    for &t in &ts {
        for &z in &zs {
            for &y in &ys {
                for &x in &xs {
                    pts.push(ChartPoint::new(x, y, z, t));
                }
            }
        }
    }
    Ok(pts)
}

pub fn sample(path: &Path, names: &[String], grid: &[usize]) -> Result<(), CliError> {
    let cfg = RunConfig::load(path)?;
    let (model, _) = build_model(&cfg)?;
    let points = lattice(&model, grid)?;
    let rows = fields::sample(&model, names, &points)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    let header: Vec<&str> = ["x", "y", "z", "t"].into_iter().chain(names.iter().map(String::as_str)).collect();
    w.write_record(&header).map_err(csv_err)?;
    for (p, row) in points.iter().zip(&rows) {
        let rec: Vec<String> = p.coords.iter().chain(row).map(|v| format!("{v:e}")).collect();
        w.write_record(&rec).map_err(csv_err)?;
    }
    let buf = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    emit(cfg.output.samples.as_deref().map(|p| cfg.resolve(p)).as_deref(), &buf)
}
