use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::fem::{LoadCase, Material, SolverOptions};
use crate::mesh::fixtures::FixtureParams;
use crate::shape::OptimizationProblem;

/// Mesh source: a native JSON file or a named fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    /// Relative paths resolve against the config file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: FixtureParams,
}

/// `"paper-steel"` or per-field overrides of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialSpec {
    Named(String),
    Overrides(MaterialOverrides),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialOverrides {
    #[serde(default)]
    pub youngs_modulus: Option<f64>,
    #[serde(default)]
    pub poisson_ratio: Option<f64>,
    #[serde(default)]
    pub density: Option<f64>,
    #[serde(default)]
    pub allowed_stress: Option<f64>,
}

impl Default for MaterialSpec {
    fn default() -> Self {
        MaterialSpec::Named("paper-steel".into())
    }
}

impl MaterialSpec {
    pub fn resolve(&self) -> Result<Material, PipelineError> {
        let base = Material::cast_steel();
        let m = match self {
            MaterialSpec::Named(name) if name == "paper-steel" => base,
            MaterialSpec::Named(name) => {
                return Err(PipelineError::Config(format!("unknown material `{name}` (known: paper-steel)")))
            }
            MaterialSpec::Overrides(o) => Material {
                youngs_modulus: o.youngs_modulus.unwrap_or(base.youngs_modulus),
                poisson_ratio: o.poisson_ratio.unwrap_or(base.poisson_ratio),
                density: o.density.unwrap_or(base.density),
                allowed_stress: o.allowed_stress.unwrap_or(base.allowed_stress),
            },
        };
        m.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(m)
    }
}

/// One run: mesh, material, loads, optional optimization problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshSpec,
    #[serde(default)]
    pub material: MaterialSpec,
    #[serde(default)]
    pub loads: LoadCase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<OptimizationProblem>,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Used when no output directory is given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Only consumed by randomized tests; the analysis is deterministic.
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Parses a config document; relative paths resolve against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self, PipelineError> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        match (&cfg.mesh.path, &cfg.mesh.fixture) {
            (Some(_), Some(_)) => return Err(PipelineError::Config("mesh: give either `path` or `fixture`, not both".into())),
            (None, None) => return Err(PipelineError::Config("mesh: one of `path` or `fixture` is required".into())),
            (Some(_), None) if !cfg.mesh.params.is_empty() => {
                return Err(PipelineError::Config("mesh: `params` only applies to fixtures".into()))
            }
            _ => {}
        }
        if let Some(p) = &mut cfg.mesh.path {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if !p.is_file() {
                return Err(PipelineError::Config(format!("mesh file {} does not exist", p.display())));
            }
        }
        if let Some(p) = &mut cfg.output_dir {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.material.resolve()?;
        Ok(cfg)
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    RunConfig::from_json(&text, base)
}
