use serde::{Deserialize, Serialize};

use super::{FemError, Solution};
use crate::mesh::Mesh;

pub const DEFAULT_AGGREGATION_EXPONENT: f64 = 8.0;

/// Scalar responses of a solved state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Response {
    /// J
    pub compliance: f64,
    /// Pa
    pub max_vm: f64,
    /// Volume-weighted p-mean of `σ_vm / sigma_ref`.
    pub aggregate: f64,
}

fn check_aggregation(p: f64, sigma_ref: f64) -> Result<(), FemError> {
    if !(sigma_ref > 0.0) || !sigma_ref.is_finite() {
        return Err(FemError::InvalidArgument(format!("sigma_ref must be positive, got {sigma_ref}")));
    }
    if !(p >= 2.0) || !p.is_finite() {
        return Err(FemError::InvalidArgument(format!("aggregation exponent must be at least 2, got {p}")));
    }
    Ok(())
}

/// `Θ = (Σ v_e (s_e/σ_ref)^p / Σ v_e)^(1/p)`, evaluated with the largest
/// ratio factored out so large `p` does not overflow.
pub fn stress_aggregate(volumes: &[f64], von_mises: &[f64], p: f64, sigma_ref: f64) -> Result<f64, FemError> {
    check_aggregation(p, sigma_ref)?;
    if volumes.len() != von_mises.len() {
        return Err(FemError::Mismatch(format!(
            "{} volumes for {} stress values",
            volumes.len(),
            von_mises.len()
        )));
    }
    let r_max = von_mises.iter().fold(0.0f64, |m, s| m.max(s / sigma_ref));
    if r_max == 0.0 {
        return Ok(0.0);
    }
    let total: f64 = volumes.iter().sum();
    let sum: f64 = volumes
        .iter()
        .zip(von_mises)
        .map(|(v, s)| v * (s / sigma_ref / r_max).powf(p))
        .sum();
    Ok(r_max * (sum / total).powf(1.0 / p))
}

pub(crate) fn element_volumes(mesh: &Mesh) -> Vec<f64> {
    (0..mesh.element_count()).map(|e| mesh.element_measure(e)).collect()
}

pub fn evaluate(mesh: &Mesh, solution: &Solution, p: f64, sigma_ref: f64) -> Result<Response, FemError> {
    if solution.von_mises.len() != mesh.element_count() || solution.displacement.len() != mesh.node_count() {
        return Err(FemError::Mismatch("solution does not match mesh".into()));
    }
    Ok(Response {
        compliance: solution.compliance,
        max_vm: solution.max_von_mises(),
        aggregate: stress_aggregate(&element_volumes(mesh), &solution.von_mises, p, sigma_ref)?,
    })
}
