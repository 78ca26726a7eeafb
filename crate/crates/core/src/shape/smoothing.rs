use nalgebra::Vector3;

use super::{NodeField, ShapeError};
use crate::fem::solver::LinearSolver;
use crate::fem::{assemble, check_rigid_modes, FemError, Material, SolverOptions};
use crate::mesh::Mesh;

/// Poisson ratio of the pseudo-elastic smoothing operator.
pub const SMOOTHING_POISSON_RATIO: f64 = 0.3;

/// Traction method: applies `−raw` as a nodal load on a unit-modulus
/// elastic body clamped at `frozen` and returns its displacement as the
/// velocity field. Frozen nodes get exactly zero velocity.
pub fn traction_smooth(mesh: &Mesh, raw: &[Vector3<f64>], frozen: &[usize], poisson_ratio: f64) -> Result<NodeField, ShapeError> {
    if raw.len() != mesh.node_count() {
        return Err(ShapeError::Mismatch(format!(
            "gradient has {} entries for {} nodes",
            raw.len(),
            mesh.node_count()
        )));
    }
    if raw.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
        return Err(ShapeError::Fem(FemError::InvalidArgument("non-finite raw gradient".into())));
    }
    let dim = mesh.dimension();
    let mut prescribed = vec![None; mesh.dof_count()];
    for &n in frozen {
        for c in 0..dim {
            prescribed[dim * n + c] = Some(0.0);
        }
    }
    check_rigid_modes(mesh, &prescribed).map_err(|e| match e {
        FemError::UnconstrainedRigidMode(modes) => ShapeError::SmoothingSingular(modes),
        other => other.into(),
    })?;
    let k = assemble(mesh, &Material::smoothing(poisson_ratio))?;
    let free: Vec<usize> = (0..prescribed.len()).filter(|&i| prescribed[i].is_none()).collect();
    let solver = LinearSolver::new(k.submatrix(&free), &SolverOptions::default())?;
    let rhs: Vec<f64> = free.iter().map(|&i| -raw[i / dim][i % dim]).collect();
    let x = solver.solve(&rhs, SolverOptions::default().rtol)?;
    let mut v = vec![Vector3::zeros(); mesh.node_count()];
    for (&i, xi) in free.iter().zip(x) {
        v[i / dim][i % dim] = xi;
    }
    Ok(v)
}
