//! Run configuration: a TOML file with `[surface]`, `[verify]`, `[pde]` and
//! `[output]` tables. Expressions are infix strings over `x, y, z, t`, the
//! constants `pi` and `e`, and any names declared in `[surface.params]`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use gcalabi::exterior::Domain;
use gcalabi::pde::read_grid_csv;
use gcalabi::scalar::{parse_expr, GridData, ScalarField};
use gcalabi::surfaces::{
    volume_potential, AlphaProfile, BuildOptions, Family, Mutation, SurfaceSpec,
};

use crate::CliError;

/// Overrides `verify.samples` when the config leaves it out.
pub const SAMPLES_ENV: &str = "GCALABI_SAMPLES";
pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    pub pde: Option<PdeConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlphaConfig {
    Constant { c: f64 },
    Semi,
    Tan { a: f64 },
    Coth { a: f64 },
    Tanh { a: f64 },
    Expr { alpha: String, primitive: String, interval: [f64; 2] },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialMode {
    /// `l2` and `n2` given as expressions.
    Explicit,
    /// From the gradient of `ln H` (generalized families).
    #[default]
    FromHGradients,
    /// `(0, ∫₀ˣ h²)`, Calabi only.
    VolumePotential,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub family: String,
    pub a: Option<f64>,
    pub alpha: Option<AlphaConfig>,
    pub h: Option<String>,
    pub h_grid: Option<PathBuf>,
    #[serde(rename = "H")]
    pub big_h: Option<String>,
    #[serde(rename = "H_grid")]
    pub big_h_grid: Option<PathBuf>,
    pub potentials: Option<PotentialMode>,
    pub l2: Option<String>,
    pub n2: Option<String>,
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
    #[serde(default = "unit_interval")]
    pub t: [f64; 2],
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub flip_potentials: bool,
    pub mutation: Option<Mutation>,
    pub tolerance: Option<f64>,
}

fn unit_interval() -> [f64; 2] {
    [0.0, 1.0]
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// The constant root of `c₁h² + c₂e^{2u} = 0` evaluated with `h` at each
    /// boundary node.
    ConstantRoot,
    /// `u` on the boundary from `pde.u`.
    Expr,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeConfig {
    /// Nodes per side; several sizes give a refinement study.
    pub n: Vec<usize>,
    #[serde(default = "pde_tol")]
    pub tol: f64,
    #[serde(default = "max_iter")]
    pub max_iter: usize,
    pub boundary: BoundaryMode,
    /// Boundary data for `expr`, and the exact solution for `--manufactured`.
    pub u: Option<String>,
}

fn pde_tol() -> f64 {
    1e-10
}

fn max_iter() -> usize {
    30
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub solution: Option<PathBuf>,
    pub solve_report: Option<PathBuf>,
    pub samples: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn family(&self) -> Result<Family, CliError> {
        self.surface.family.parse().map_err(|e| config_err(format!("surface.family: {e}")))
    }

    pub fn samples(&self) -> Result<usize, CliError> {
        if let Some(n) = self.verify.samples {
            return Ok(n);
        }
        match std::env::var(SAMPLES_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| config_err(format!("{SAMPLES_ENV} = {v:?} is not a sample count"))),
            Err(_) => Ok(DEFAULT_SAMPLES),
        }
    }

    pub fn tol(&self) -> f64 {
        self.verify.tol.unwrap_or(1e-8)
    }

    pub fn domain(&self) -> Domain {
        let s = &self.surface;
        Domain::new((s.x[0], s.x[1]), (s.y[0], s.y[1]), (s.z[0], s.z[1]), (s.t[0], s.t[1]))
    }

    /// Parse an expression and bind the declared parameters.
    pub fn expr(&self, field: &str, src: &str) -> Result<ScalarField, CliError> {
        let names: Vec<&str> = self.surface.params.keys().map(String::as_str).collect();
        let f = parse_expr(src, &names).map_err(|e| config_err(format!("{field} = {src:?}: {e}")))?;
        Ok(f.bind(&self.surface.params))
    }

    fn grid(&self, field: &str, path: &Path) -> Result<ScalarField, CliError> {
        let full = self.resolve(path);
        let file = fs::File::open(&full).map_err(|e| config_err(format!("{field} = {}: {e}", full.display())))?;
        let g = read_grid_csv(file).map_err(|e| config_err(format!("{field} = {}: {e}", full.display())))?;
        let data = GridData::new(g.x, g.y, g.nx, g.ny, g.values)
            .map_err(|e| config_err(format!("{field} = {}: {e}", full.display())))?;
        Ok(ScalarField::grid(Arc::new(data)))
    }

    fn expr_or_grid(&self, name: &str, src: &Option<String>, grid: &Option<PathBuf>) -> Result<Option<ScalarField>, CliError> {
        match (src, grid) {
            (Some(_), Some(_)) => Err(config_err(format!("surface.{name} and surface.{name}_grid are exclusive"))),
            (Some(s), None) => Ok(Some(self.expr(&format!("surface.{name}"), s)?)),
            (None, Some(p)) => Ok(Some(self.grid(&format!("surface.{name}_grid"), p)?)),
            (None, None) => Ok(None),
        }
    }

    pub fn h(&self) -> Result<ScalarField, CliError> {
        self.expr_or_grid("h", &self.surface.h, &self.surface.h_grid)?
            .ok_or_else(|| config_err("missing field surface.h (or surface.h_grid)"))
    }

    pub fn big_h(&self) -> Result<Option<ScalarField>, CliError> {
        self.expr_or_grid("H", &self.surface.big_h, &self.surface.big_h_grid)
    }

    fn alpha_profile(&self) -> Result<AlphaProfile, CliError> {
        let alpha = self
            .surface
            .alpha
            .as_ref()
            .ok_or_else(|| config_err("missing field surface.alpha for family calabi"))?;
        let bad = |e| config_err(format!("surface.alpha: {e}"));
        match alpha {
            AlphaConfig::Constant { c } => AlphaProfile::constant(*c).map_err(bad),
            AlphaConfig::Semi => Ok(AlphaProfile::semi_symmetric()),
            AlphaConfig::Tan { a } => AlphaProfile::tan(*a).map_err(bad),
            AlphaConfig::Coth { a } => AlphaProfile::coth(*a).map_err(bad),
            AlphaConfig::Tanh { a } => AlphaProfile::tanh(*a).map_err(bad),
            AlphaConfig::Expr { alpha, primitive, interval } => {
                let al = self.expr("surface.alpha.alpha", alpha)?;
                let pr = self.expr("surface.alpha.primitive", primitive)?;
                AlphaProfile::user_defined(al, pr, (interval[0], interval[1])).map_err(bad)
            }
        }
    }

    fn explicit_potentials(&self) -> Result<(ScalarField, ScalarField), CliError> {
        let get = |name: &str, v: &Option<String>| -> Result<ScalarField, CliError> {
            let src = v
                .as_ref()
                .ok_or_else(|| config_err(format!("missing field surface.{name} (potentials = \"explicit\")")))?;
            self.expr(&format!("surface.{name}"), src)
        };
        Ok((get("l2", &self.surface.l2)?, get("n2", &self.surface.n2)?))
    }

    /// Builder input. Grid-backed data gets its build tolerance relaxed to
    /// `max(tol, C · spacing²)`; the relaxed value is returned alongside.
    pub fn spec(&self, grid_constant: f64) -> Result<(SurfaceSpec, Option<f64>), CliError> {
        let family = self.family()?;
        let domain = self.domain();
        let h = self.h()?;
        let s = &self.surface;
        let mut spec = if family == Family::Calabi {
            if s.big_h.is_some() || s.big_h_grid.is_some() {
                return Err(config_err("surface.H is not used by family calabi"));
            }
            let alpha = self.alpha_profile()?;
            let (l2, n2) = match s.potentials.unwrap_or(PotentialMode::Explicit) {
                PotentialMode::Explicit => self.explicit_potentials()?,
                PotentialMode::VolumePotential => {
                    volume_potential(&h, &domain).map_err(|e| config_err(format!("surface.potentials: {e}")))?
                }
                PotentialMode::FromHGradients => {
                    return Err(config_err("surface.potentials = \"from-h-gradients\" needs a family with H"))
                }
            };
            SurfaceSpec::calabi(alpha, h, l2, n2, domain)
        } else {
            let a = s.a.ok_or_else(|| config_err(format!("missing field surface.a for family {family}")))?;
            if s.alpha.is_some() {
                return Err(config_err(format!("surface.alpha is fixed by family {family}; remove it")));
            }
            let big_h = self
                .big_h()?
                .ok_or_else(|| config_err(format!("missing field surface.H (or surface.H_grid) for family {family}")))?;
            let mut spec = SurfaceSpec::generalized(family, a, h, big_h, domain)
                .map_err(|e| config_err(format!("surface: {e}")))?;
            match s.potentials.unwrap_or_default() {
                PotentialMode::FromHGradients => {}
                PotentialMode::Explicit => {
                    let (l2, n2) = self.explicit_potentials()?;
                    spec = spec.with_potentials(l2, n2);
                }
                PotentialMode::VolumePotential => {
                    return Err(config_err(format!(
                        "surface.potentials = \"volume-potential\" is for family calabi; {family} takes them from H"
                    )))
                }
            }
            spec
        };
        let tol = s.tolerance.unwrap_or(1e-8);
        if !(tol > 0.0) {
            return Err(config_err(format!("surface.tolerance must be positive, got {tol}")));
        }
        let spacing = [Some(&spec.h), spec.big_h.as_ref()]
            .into_iter()
            .flatten()
            .filter_map(ScalarField::grid_spacing)
            .fold(None, |m: Option<f64>, s| Some(m.map_or(s, |m| m.max(s))));
        let relaxed = spacing.map(|sp| tol.max(grid_constant * sp * sp));
        spec = spec.with_options(BuildOptions {
            tolerance: relaxed.unwrap_or(tol),
            flip_potentials: s.flip_potentials,
            mutation: s.mutation,
        });
        Ok((spec, relaxed))
    }
}
