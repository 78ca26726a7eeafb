use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::gradient::{compliance_gradient, stress_aggregate_gradient, volume_gradient};
use super::ShapeError;
use crate::fem::{
    element_volumes, solve_static, stress_aggregate, FemError, LoadCase, Material, SolverOptions,
    DEFAULT_AGGREGATION_EXPONENT,
};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    Volume,
    Compliance,
    Aggregate,
}

/// Everything a state-dependent functional needs besides the mesh.
#[derive(Debug, Clone)]
pub struct FdContext {
    pub material: Material,
    pub loads: LoadCase,
    pub solver: SolverOptions,
    pub aggregation_exponent: f64,
    /// Defaults to the material's allowed stress.
    pub sigma_ref: Option<f64>,
}

impl FdContext {
    pub fn new(material: Material, loads: LoadCase) -> Self {
        FdContext {
            material,
            loads,
            solver: SolverOptions::default(),
            aggregation_exponent: DEFAULT_AGGREGATION_EXPONENT,
            sigma_ref: None,
        }
    }

    fn sigma_ref(&self) -> f64 {
        self.sigma_ref.unwrap_or(self.material.allowed_stress)
    }

    pub fn value(&self, mesh: &Mesh, functional: Functional) -> Result<f64, ShapeError> {
        Ok(match functional {
            Functional::Volume => mesh.volume(),
            Functional::Compliance => solve_static(mesh, &self.material, &self.loads, &self.solver)?.compliance,
            Functional::Aggregate => {
                let sol = solve_static(mesh, &self.material, &self.loads, &self.solver)?;
                stress_aggregate(&element_volumes(mesh), &sol.von_mises, self.aggregation_exponent, self.sigma_ref())?
            }
        })
    }

    pub fn gradient(&self, mesh: &Mesh, functional: Functional) -> Result<Vec<Vector3<f64>>, ShapeError> {
        if functional == Functional::Volume {
            return Ok(volume_gradient(mesh, None));
        }
        let sol = solve_static(mesh, &self.material, &self.loads, &self.solver)?;
        match functional {
            Functional::Compliance => compliance_gradient(mesh, &self.material, &self.loads, &sol, &self.solver),
            _ => stress_aggregate_gradient(
                mesh,
                &self.material,
                &self.loads,
                &sol,
                self.aggregation_exponent,
                self.sigma_ref(),
                &self.solver,
            ),
        }
    }
}

fn perturbed(mesh: &Mesh, direction: &[Vector3<f64>], s: f64) -> Result<Mesh, ShapeError> {
    let nodes = mesh
        .nodes()
        .iter()
        .zip(direction)
        .map(|(p, d)| [p[0] + s * d.x, p[1] + s * d.y, p[2] + s * d.z])
        .collect();
    let m = mesh.with_nodes(nodes);
    if let Some(e) = (0..m.element_count()).find(|&e| m.element_measure(e) <= 0.0) {
        return Err(ShapeError::InvalidPerturbation(format!("element {e} inverts at offset {s:e}")));
    }
    Ok(m)
}

/// `|(J(x+hd) − J(x−hd))/(2h) − gᵀd| / max(|gᵀd|, 1e-30)`.
pub fn fd_check(
    mesh: &Mesh,
    functional: Functional,
    context: &FdContext,
    direction: &[Vector3<f64>],
    h: f64,
) -> Result<f64, ShapeError> {
    if !(h > 0.0) {
        return Err(FemError::InvalidArgument(format!("step must be positive, got {h}")).into());
    }
    if direction.len() != mesh.node_count() || direction.iter().any(|d| !d.iter().all(|c| c.is_finite())) {
        return Err(ShapeError::Mismatch("direction must be one finite vector per node".into()));
    }
    let direction: Vec<Vector3<f64>> = if mesh.dimension() == 2 {
        direction.iter().map(|d| Vector3::new(d.x, d.y, 0.0)).collect()
    } else {
        direction.to_vec()
    };
    let g = context.gradient(mesh, functional)?;
    let plus_mesh = perturbed(mesh, &direction, h)?;
    let minus_mesh = perturbed(mesh, &direction, -h)?;
    // The direction actually applied after rounding the perturbed coordinates.
    let analytic: f64 = g
        .iter()
        .zip(plus_mesh.nodes().iter().zip(minus_mesh.nodes()))
        .map(|(g, (p, m))| (0..3).map(|c| g[c] * ((p[c] - m[c]) / (2.0 * h))).sum::<f64>())
        .sum();
    let plus = context.value(&plus_mesh, functional)?;
    let minus = context.value(&minus_mesh, functional)?;
    let fd = (plus - minus) / (2.0 * h);
    Ok((fd - analytic).abs() / analytic.abs().max(1e-30))
}
