//! Linear elastostatics on tri3 (plane stress) and tet4 meshes.

mod assembly;
mod element;
mod exact;
mod loads;
mod material;
mod response;
pub mod solver;
pub mod sparse;
mod static_solve;
mod stress;

use thiserror::Error;

use crate::mesh::MeshError;

pub use assembly::assemble;
pub use element::{element_stiffness, strain_displacement};
pub use loads::{load_vector, DirichletBc, LoadCase, LoadKind, NeumannLoad};
pub use material::Material;
pub use response::{evaluate, stress_aggregate, Response, DEFAULT_AGGREGATION_EXPONENT};
pub use solver::{SolverKind, SolverOptions};
pub use static_solve::{solve_static, Solution};
pub use stress::{recover_stress, von_mises, StressField};

pub(crate) use loads::load_sensitivity;
pub(crate) use response::element_volumes;
pub(crate) use static_solve::{check_rigid_modes, StaticSystem};
pub(crate) use stress::{element_gradient, node_vectors};

#[derive(Debug, Error)]
pub enum FemError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("invalid material: {0}")]
    Material(String),
    #[error("degenerate element{}", .0.map(|e| format!(" {e}")).unwrap_or_default())]
    DegenerateElement(Option<usize>),
    #[error("invalid load case: {0}")]
    Load(String),
    #[error("singular system: unconstrained rigid-body mode(s): {0}")]
    UnconstrainedRigidMode(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("linear solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("size mismatch: {0}")]
    Mismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
