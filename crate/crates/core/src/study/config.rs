use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hodge::HodgeMethod;
use crate::mesh::{build_cartesian_hex, build_prismatic_polygonal, perturb_hex, Aabb, PrimalMesh};
use crate::schemes::{ManufacturedCase, SchemeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFamily {
    /// Uniform hexahedra on the unit cube.
    Cart,
    /// Randomly perturbed hexahedra.
    Pert,
    /// Extruded brick-honeycomb prisms.
    Prism,
}

impl MeshFamily {
    pub fn tag(self) -> &'static str {
        match self {
            MeshFamily::Cart => "cart",
            MeshFamily::Pert => "pert",
            MeshFamily::Prism => "prism",
        }
    }
}

impl std::str::FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cart" => Ok(MeshFamily::Cart),
            "pert" => Ok(MeshFamily::Pert),
            "prism" => Ok(MeshFamily::Prism),
            other => Err(Error::Config(format!(
                "unknown mesh family '{other}' (known: cart, pert, prism)"
            ))),
        }
    }
}

fn default_amplitude() -> f64 {
    0.2
}

fn default_seed() -> u64 {
    42
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub family: MeshFamily,
    /// Cells per direction; for prisms the layer count, with `n / 2` rings.
    pub n: usize,
    /// Perturbation amplitude as a fraction of the local spacing (`pert`
    /// only).
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl MeshConfig {
    /// Builds the mesh at resolution `n` with perturbation seed `seed`.
    pub fn build(&self, n: usize, seed: u64) -> Result<PrimalMesh> {
        match self.family {
            MeshFamily::Cart => build_cartesian_hex([n; 3], Aabb::unit()),
            MeshFamily::Pert => perturb_hex(
                &build_cartesian_hex([n; 3], Aabb::unit())?,
                self.amplitude,
                seed,
            ),
            MeshFamily::Prism => build_prismatic_polygonal(n, n / 2),
        }
    }

    fn check_n(&self, n: usize) -> Result<()> {
        match self.family {
            MeshFamily::Prism if n < 2 || !n.is_multiple_of(2) => Err(Error::Config(format!(
                "prism meshes need an even n >= 2, got {n}"
            ))),
            _ if n == 0 => Err(Error::Config("n must be positive".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HodgeConfig {
    #[serde(default = "HodgeConfig::default_method")]
    pub method: String,
    #[serde(default = "HodgeConfig::default_beta")]
    pub beta: f64,
}

impl HodgeConfig {
    fn default_method() -> String {
        "reconstruction".into()
    }

    fn default_beta() -> f64 {
        1.0
    }
}

impl Default for HodgeConfig {
    fn default() -> Self {
        Self {
            method: Self::default_method(),
            beta: Self::default_beta(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "SolverConfig::default_tol")]
    pub tol: f64,
    #[serde(default = "SolverConfig::default_max_iter")]
    pub max_iter: usize,
}

impl SolverConfig {
    fn default_tol() -> f64 {
        1e-10
    }

    fn default_max_iter() -> usize {
        20_000
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: Self::default_tol(),
            max_iter: Self::default_max_iter(),
        }
    }
}

/// One run of one scheme on one mesh, as read from a JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: String,
    pub mesh: MeshConfig,
    pub case: String,
    #[serde(default)]
    pub hodge: HodgeConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Directory for report files; nothing is written when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// A validated [`RunConfig`] with names resolved.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedConfig {
    pub scheme: SchemeKind,
    pub mesh: MeshConfig,
    pub case: ManufacturedCase,
    pub method: HodgeMethod,
    pub beta: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub output: Option<PathBuf>,
}

fn config_err(e: Error) -> Error {
    match e {
        Error::InvalidArgument(m) => Error::Config(m),
        other => other,
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), e.root())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Resolves names and checks ranges without building anything.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let scheme = self.scheme.parse().map_err(config_err)?;
        let case = ManufacturedCase::builtin(&self.case).map_err(config_err)?;
        let method = self.hodge.method.parse().map_err(config_err)?;
        self.mesh.check_n(self.mesh.n)?;
        if self.mesh.family == MeshFamily::Pert && !(0.0..0.5).contains(&self.mesh.amplitude) {
            return Err(Error::Config(format!(
                "amplitude must lie in [0, 0.5), got {}",
                self.mesh.amplitude
            )));
        }
        if !(self.hodge.beta > 0.0 && self.hodge.beta.is_finite()) {
            return Err(Error::Config(format!(
                "beta must be positive, got {}",
                self.hodge.beta
            )));
        }
        if !(self.solver.tol > 0.0 && self.solver.tol < 1.0) {
            return Err(Error::Config(format!(
                "solver tolerance must lie in (0, 1), got {}",
                self.solver.tol
            )));
        }
        if self.solver.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        Ok(ResolvedConfig {
            scheme,
            mesh: self.mesh.clone(),
            case,
            method,
            beta: self.hodge.beta,
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            output: self.output.clone(),
        })
    }
}

impl ResolvedConfig {
    pub fn check_levels(&self, levels: &[usize]) -> Result<()> {
        levels.iter().try_for_each(|&n| self.mesh.check_n(n))
    }
}
