use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{MeshSpec, RunConfig};
use super::fields::write_fields;
use super::history::write_history;
use super::{write_atomic, PipelineError};
use crate::export::{check_manifold, draft_check, surface_mesh, write_stl, DraftReport, ManifoldReport, StlFormat};
use crate::fem::{evaluate, solve_static, DEFAULT_AGGREGATION_EXPONENT};
use crate::mesh::{load_mesh, make_fixture, save_mesh, validate, Mesh, MeshReport};
use crate::shape::{Optimizer, StopReason};

const PA_PER_MPA: f64 = 1e6;

/// Contents of `summary.json` after a static analysis. SI units except the
/// `_MPa` display fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub nodes: usize,
    pub elements: usize,
    /// m³
    pub volume: f64,
    /// kg
    pub mass: f64,
    /// J
    pub compliance: f64,
    /// Pa
    pub max_vm: f64,
    #[serde(rename = "max_vm_MPa")]
    pub max_vm_mpa: f64,
    pub aggregate: f64,
    pub aggregation_exponent: f64,
    /// Pa
    pub sigma_ref: f64,
    /// N
    pub reaction: [f64; 3],
}

/// Contents of `summary.json` after an optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSummary {
    pub iterations: usize,
    pub accepted_steps: usize,
    pub stop: StopReason,
    pub stalled: bool,
    /// m³
    pub initial_volume: f64,
    /// m³
    pub final_volume: f64,
    /// `1 − final/initial`
    pub volume_reduction: f64,
    /// kg
    pub final_mass: f64,
    /// Pa
    pub initial_max_vm: f64,
    /// Pa
    pub final_max_vm: f64,
    #[serde(rename = "initial_max_vm_MPa")]
    pub initial_max_vm_mpa: f64,
    #[serde(rename = "final_max_vm_MPa")]
    pub final_max_vm_mpa: f64,
    /// `initial / final`
    pub max_vm_reduction_factor: f64,
    pub initial_aggregate: f64,
    pub final_aggregate: f64,
    /// J
    pub initial_compliance: f64,
    /// J
    pub final_compliance: f64,
    /// Resolved constraint bound (Θ or m³ depending on the mode).
    pub constraint_limit: f64,
    pub lagrange_multiplier: f64,
    pub penalty: f64,
}

pub fn load_mesh_file(path: &Path) -> Result<Mesh, PipelineError> {
    let file = File::open(path).map_err(|source| PipelineError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    load_mesh(std::io::BufReader::new(file)).map_err(PipelineError::from)
}

fn build_mesh(spec: &MeshSpec) -> Result<Mesh, PipelineError> {
    match (&spec.path, &spec.fixture) {
        (Some(path), None) => load_mesh_file(path),
        (None, Some(name)) => Ok(make_fixture(name, &spec.params)?),
        _ => Err(PipelineError::Config("mesh: exactly one of `path` or `fixture` is required".into())),
    }
}

fn create_dir(dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir).map_err(|source| PipelineError::Output {
        path: dir.to_path_buf(),
        source,
    })
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("summary types serialize");
    s.push('\n');
    s.into_bytes()
}

/// Static analysis: writes `solution.vtk` and `summary.json` into `out`.
/// Nothing is written unless the analysis succeeds.
pub fn run_solve(config: &RunConfig, out: &Path) -> Result<SolveSummary, PipelineError> {
    let mesh = build_mesh(&config.mesh)?;
    let material = config.material.resolve()?;
    let solution = solve_static(&mesh, &material, &config.loads, &config.solver)?;
    let p = config.problem.as_ref().map_or(DEFAULT_AGGREGATION_EXPONENT, |p| p.aggregation_exponent);
    let sigma_ref = config
        .problem
        .as_ref()
        .and_then(|p| p.sigma_ref)
        .unwrap_or(material.allowed_stress);
    let response = evaluate(&mesh, &solution, p, sigma_ref)?;
    let volume = mesh.volume();
    let summary = SolveSummary {
        nodes: mesh.node_count(),
        elements: mesh.element_count(),
        volume,
        mass: volume * material.density,
        compliance: response.compliance,
        max_vm: response.max_vm,
        max_vm_mpa: response.max_vm / PA_PER_MPA,
        aggregate: response.aggregate,
        aggregation_exponent: p,
        sigma_ref,
        reaction: solution.reaction,
    };
    let vtk = write_fields(&mesh, &solution)?;
    create_dir(out)?;
    write_atomic(&out.join("solution.vtk"), vtk.as_bytes())?;
    write_atomic(&out.join("summary.json"), &json(&summary))?;
    log::info!("solve: max von Mises {:.6e} Pa, compliance {:.6e} J", summary.max_vm, summary.compliance);
    Ok(summary)
}

/// Optimization: writes `history.csv`, `history.svg`, `final_mesh.json`,
/// `final_solution.vtk`, `summary.json` and, for 3D meshes, `final.stl`.
/// A stalled run still writes everything and reports `stalled`.
pub fn run_optimize(config: &RunConfig, out: &Path) -> Result<OptimizeSummary, PipelineError> {
    let problem = config
        .problem
        .clone()
        .ok_or_else(|| PipelineError::Config("`problem` is required for optimize".into()))?;
    let mesh = build_mesh(&config.mesh)?;
    let material = config.material.resolve()?;
    let optimizer = Optimizer::new(mesh, material, config.loads.clone(), problem, config.solver)?;
    let initial = *optimizer.response();
    let initial_volume = optimizer.initial_volume();
    let limit = optimizer.limit();
    let result = optimizer.run()?;
    let final_volume = result.mesh.volume();
    let summary = OptimizeSummary {
        iterations: result.history.len(),
        accepted_steps: result.history.iter().filter(|r| r.accepted && r.step_size > 0.0).count(),
        stop: result.stop,
        stalled: result.stop == StopReason::Stalled,
        initial_volume,
        final_volume,
        volume_reduction: 1.0 - final_volume / initial_volume,
        final_mass: final_volume * material.density,
        initial_max_vm: initial.max_vm,
        final_max_vm: result.response.max_vm,
        initial_max_vm_mpa: initial.max_vm / PA_PER_MPA,
        final_max_vm_mpa: result.response.max_vm / PA_PER_MPA,
        max_vm_reduction_factor: if result.response.max_vm > 0.0 {
            initial.max_vm / result.response.max_vm
        } else {
            f64::INFINITY
        },
        initial_aggregate: initial.aggregate,
        final_aggregate: result.response.aggregate,
        initial_compliance: initial.compliance,
        final_compliance: result.response.compliance,
        constraint_limit: limit,
        lagrange_multiplier: result.lagrange_multiplier,
        penalty: result.penalty,
    };
    let (csv, svg) = write_history(&result.history, initial_volume, initial.max_vm);
    let vtk = write_fields(&result.mesh, &result.solution)?;
    let stl = if result.mesh.dimension() == 3 {
        Some(write_stl(&surface_mesh(&result.mesh)?, StlFormat::Binary)?)
    } else {
        None
    };
    create_dir(out)?;
    write_atomic(&out.join("history.csv"), csv.as_bytes())?;
    write_atomic(&out.join("history.svg"), svg.as_bytes())?;
    write_atomic(&out.join("final_mesh.json"), save_mesh(&result.mesh).as_bytes())?;
    write_atomic(&out.join("final_solution.vtk"), vtk.as_bytes())?;
    if let Some(stl) = stl {
        write_atomic(&out.join("final.stl"), &stl)?;
    }
    write_atomic(&out.join("summary.json"), &json(&summary))?;
    log::info!(
        "optimize: {} iterations ({:?}), volume {:.4} of initial",
        summary.iterations,
        summary.stop,
        final_volume / initial_volume
    );
    Ok(summary)
}

/// Writes the boundary of a 3D mesh file as STL and returns the manifold
/// check of what was written.
pub fn export_stl(mesh_path: &Path, out: &Path, format: StlFormat, scale: f64) -> Result<ManifoldReport, PipelineError> {
    let mesh = load_mesh_file(mesh_path)?;
    let surface = surface_mesh(&mesh)?.with_scale(scale)?;
    let bytes = write_stl(&surface, format)?;
    write_atomic(out, &bytes)?;
    Ok(check_manifold(&surface))
}

pub fn check_draft(mesh_path: &Path, pull: [f64; 3], min_angle: f64) -> Result<DraftReport, PipelineError> {
    let mesh = load_mesh_file(mesh_path)?;
    Ok(draft_check(&surface_mesh(&mesh)?, pull, min_angle)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshInfo {
    pub path: PathBuf,
    pub dimension: usize,
    pub nodes: usize,
    pub elements: usize,
    /// Region name to `(kind, member count)`.
    pub regions: BTreeMap<String, (String, usize)>,
    pub report: MeshReport,
}

pub fn mesh_info(mesh_path: &Path) -> Result<MeshInfo, PipelineError> {
    let mesh = load_mesh_file(mesh_path)?;
    let regions = mesh
        .regions()
        .map(|r| {
            let count = match &r.members {
                crate::mesh::RegionMembers::Nodes(n) => n.len(),
                crate::mesh::RegionMembers::Facets(f) => f.len(),
            };
            (r.name.clone(), (r.members.kind_name().to_string(), count))
        })
        .collect();
    Ok(MeshInfo {
        path: mesh_path.to_path_buf(),
        dimension: mesh.dimension(),
        nodes: mesh.node_count(),
        elements: mesh.element_count(),
        regions,
        report: validate(&mesh),
    })
}
