//! Shape sensitivities, traction-method smoothing, step control and the
//! augmented-Lagrangian optimization loop.

mod fdcheck;
mod gradient;
mod optimize;
mod smoothing;
mod step;

use thiserror::Error;

use crate::fem::FemError;
use crate::mesh::MeshError;

pub use fdcheck::{fd_check, FdContext, Functional};
pub use gradient::{compliance_gradient, stress_aggregate_gradient, volume_gradient, NodeField};
pub use optimize::{optimize, HistoryRecord, Mode, OptimizationProblem, OptimizationResult, Optimizer, StopReason};
pub use smoothing::{traction_smooth, SMOOTHING_POISSON_RATIO};
pub use step::{step, step_with_merit, StepControl, StepOutcome};

#[derive(Debug, Error)]
pub enum ShapeError {
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("smoothing system is singular: frozen nodes leave {0} free")]
    SmoothingSingular(String),
    #[error("invalid optimization problem: {0}")]
    Problem(String),
    #[error("perturbed mesh is invalid: {0}")]
    InvalidPerturbation(String),
    #[error("size mismatch: {0}")]
    Mismatch(String),
}
