use nalgebra::{Matrix3, Vector3};

use super::ShapeError;
use crate::fem::{
    element_gradient, element_volumes, load_sensitivity, load_vector, node_vectors, stress_aggregate, FemError,
    LoadCase, Material, Solution, SolverOptions, StaticSystem,
};
use crate::mesh::Mesh;

/// One vector per mesh node (z = 0 on planar meshes).
pub type NodeField = Vec<Vector3<f64>>;

fn planar(mesh: &Mesh, mut g: NodeField) -> NodeField {
    if mesh.dimension() == 2 {
        for v in &mut g {
            v.z = 0.0;
        }
    }
    g
}

pub(crate) fn restrict(field: &mut NodeField, keep: &[usize]) {
    let mut mask = vec![false; field.len()];
    for &n in keep {
        mask[n] = true;
    }
    for (v, keep) in field.iter_mut().zip(mask) {
        if !keep {
            *v = Vector3::zeros();
        }
    }
}

/// `∂V/∂x_i`, using `δV_e = V_e Σ_b δx_b·∇λ_b`. Entries outside `movable`
/// are zero; `None` means every node.
pub fn volume_gradient(mesh: &Mesh, movable: Option<&[usize]>) -> NodeField {
    let mut g = vec![Vector3::zeros(); mesh.node_count()];
    for (e, el) in mesh.elements().enumerate() {
        if let Some(s) = mesh.simplex(e) {
            for (&n, grad) in el.iter().zip(s.grads()) {
                g[n] += s.measure * grad;
            }
        }
    }
    if let Some(keep) = movable {
        restrict(&mut g, keep);
    }
    planar(mesh, g)
}

/// `∂(wᵀ K u)/∂x` for fixed `u`, `w`.
///
/// Per element, `wᵀK_e u = V ε_w : σ_u`, and with `δH = −H δF`,
/// `δV = V tr δF` the variation is `S : δF` where
/// `S = V [(ε_u:σ_w) I − H_wᵀ σ_u − H_uᵀ σ_w]`.
pub(crate) fn stiffness_sensitivity(
    mesh: &Mesh,
    material: &Material,
    u: &[Vector3<f64>],
    w: &[Vector3<f64>],
) -> Result<NodeField, FemError> {
    let dim = mesh.dimension();
    let mut g = vec![Vector3::zeros(); mesh.node_count()];
    for (e, el) in mesh.elements().enumerate() {
        let s = mesh.simplex(e).ok_or(FemError::DegenerateElement(Some(e)))?;
        let hu = element_gradient(mesh, e, u)?;
        let hw = element_gradient(mesh, e, w)?;
        let eps_u = 0.5 * (hu + hu.transpose());
        let sig_u = material.stress(dim, &eps_u);
        let sig_w = material.stress(dim, &(0.5 * (hw + hw.transpose())));
        let energy = eps_u.component_mul(&sig_w).sum();
        let big_s = s.measure * (Matrix3::identity() * energy - hw.transpose() * sig_u - hu.transpose() * sig_w);
        for (&n, grad) in el.iter().zip(s.grads()) {
            g[n] += big_s * grad;
        }
    }
    Ok(planar(mesh, g))
}

fn add_scaled(a: &mut NodeField, b: &NodeField, s: f64) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += s * y;
    }
}

fn prescribes_motion(loads: &LoadCase) -> bool {
    loads
        .dirichlet
        .iter()
        .any(|bc| bc.fixed.iter().zip(bc.value).any(|(&f, v)| f && v != 0.0))
}

fn check_solution(mesh: &Mesh, solution: &Solution) -> Result<(), ShapeError> {
    if solution.displacement.len() != mesh.node_count() || solution.von_mises.len() != mesh.element_count() {
        return Err(ShapeError::Mismatch(format!(
            "solution has {} nodes and {} elements, mesh has {} and {}",
            solution.displacement.len(),
            solution.von_mises.len(),
            mesh.node_count(),
            mesh.element_count()
        )));
    }
    Ok(())
}

/// Compliance gradient given the state `u` and the multiplier `w` solving
/// `K_FF w_F = f_F`, `w_D = 0` (equal to `u` without prescribed motion):
/// `dC/dx = ∂f/∂x·(u + w) − wᵀ ∂K/∂x u`.
fn compliance_gradient_from(
    mesh: &Mesh,
    material: &Material,
    loads: &LoadCase,
    u: &[f64],
    w: &[f64],
) -> Result<NodeField, ShapeError> {
    let uv = node_vectors(mesh, u);
    let wv = node_vectors(mesh, w);
    let mut g = load_sensitivity(mesh, loads, u)?;
    add_scaled(&mut g, &load_sensitivity(mesh, loads, w)?, 1.0);
    add_scaled(&mut g, &stiffness_sensitivity(mesh, material, &uv, &wv)?, -1.0);
    Ok(planar(mesh, g))
}

pub(crate) fn compliance_gradient_with(
    system: &StaticSystem,
    mesh: &Mesh,
    material: &Material,
    loads: &LoadCase,
    u: &[f64],
) -> Result<NodeField, ShapeError> {
    if system.has_prescribed_motion() {
        let w = system.solve_homogeneous(system.load())?;
        compliance_gradient_from(mesh, material, loads, u, &w)
    } else {
        compliance_gradient_from(mesh, material, loads, u, u)
    }
}

/// Exact discrete gradient of `C = fᵀu` with respect to node coordinates.
pub fn compliance_gradient(
    mesh: &Mesh,
    material: &Material,
    loads: &LoadCase,
    solution: &Solution,
    opts: &SolverOptions,
) -> Result<NodeField, ShapeError> {
    check_solution(mesh, solution)?;
    let u = solution.dofs(mesh.dimension());
    if prescribes_motion(loads) {
        let system = StaticSystem::new(mesh, material, loads, opts)?;
        compliance_gradient_with(&system, mesh, material, loads, &u)
    } else {
        // Validates the load case against this mesh.
        load_vector(mesh, loads)?;
        compliance_gradient_from(mesh, material, loads, &u, &u)
    }
}

pub(crate) fn aggregate_gradient_with(
    system: &StaticSystem,
    mesh: &Mesh,
    material: &Material,
    loads: &LoadCase,
    solution: &Solution,
    p: f64,
    sigma_ref: f64,
) -> Result<NodeField, ShapeError> {
    check_solution(mesh, solution)?;
    let dim = mesh.dimension();
    let volumes = element_volumes(mesh);
    let theta = stress_aggregate(&volumes, &solution.von_mises, p, sigma_ref)?;
    let r_max = solution.von_mises.iter().fold(0.0f64, |m, s| m.max(s / sigma_ref));
    let mut explicit = vec![Vector3::zeros(); mesh.node_count()];
    if r_max == 0.0 {
        return Ok(explicit);
    }
    let total: f64 = volumes.iter().sum();
    let q: Vec<f64> = solution.von_mises.iter().map(|s| s / sigma_ref / r_max).collect();
    let a: f64 = volumes.iter().zip(&q).map(|(v, q)| v * q.powf(p)).sum();
    let u = solution.dofs(dim);
    let uv = node_vectors(mesh, &u);
    let mut rhs = vec![0.0; mesh.dof_count()];
    for (e, el) in mesh.elements().enumerate() {
        let s = mesh.simplex(e).ok_or(FemError::DegenerateElement(Some(e)))?;
        let v = volumes[e];
        let d_volume = theta / p * (q[e].powf(p) / a - 1.0 / total);
        for (&n, grad) in el.iter().zip(s.grads()) {
            explicit[n] += d_volume * v * grad;
        }
        let vm = solution.von_mises[e];
        if vm == 0.0 {
            continue;
        }
        let d_vm = theta * v * q[e].powf(p - 1.0) / (r_max * a * sigma_ref);
        let sigma = solution.stress[e];
        let dev = sigma - Matrix3::identity() * (sigma.trace() / 3.0);
        let z = dev * (1.5 / vm);
        let y = material.stress(dim, &z);
        let hu = element_gradient(mesh, e, &uv)?;
        let hty = hu.transpose() * y;
        for (&n, grad) in el.iter().zip(s.grads()) {
            let yg = y * grad;
            for c in 0..dim {
                rhs[dim * n + c] += d_vm * yg[c];
            }
            explicit[n] -= d_vm * (hty * grad);
        }
    }
    let lambda = system.solve_homogeneous(&rhs)?;
    let lv = node_vectors(mesh, &lambda);
    add_scaled(&mut explicit, &stiffness_sensitivity(mesh, material, &uv, &lv)?, -1.0);
    add_scaled(&mut explicit, &load_sensitivity(mesh, loads, &lambda)?, 1.0);
    Ok(planar(mesh, explicit))
}

/// Exact discrete gradient of the stress aggregate Θ via one adjoint solve.
pub fn stress_aggregate_gradient(
    mesh: &Mesh,
    material: &Material,
    loads: &LoadCase,
    solution: &Solution,
    p: f64,
    sigma_ref: f64,
    opts: &SolverOptions,
) -> Result<NodeField, ShapeError> {
    check_solution(mesh, solution)?;
    let system = StaticSystem::new(mesh, material, loads, opts)?;
    aggregate_gradient_with(&system, mesh, material, loads, solution, p, sigma_ref)
}
