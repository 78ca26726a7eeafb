use nalgebra::{Matrix3, Vector3};

use super::{exact, FemError, Material};
use crate::mesh::Mesh;

/// Element-constant stress tensors and their von Mises values.
#[derive(Debug, Clone, PartialEq)]
pub struct StressField {
    pub stress: Vec<Matrix3<f64>>,
    pub von_mises: Vec<f64>,
}

/// Von Mises equivalent stress of a symmetric tensor.
pub fn von_mises(s: &Matrix3<f64>) -> f64 {
    let (a, b, c) = (s[(0, 0)], s[(1, 1)], s[(2, 2)]);
    let normal = 0.5 * ((a - b).powi(2) + (b - c).powi(2) + (c - a).powi(2));
    let shear = 3.0 * (s[(0, 1)].powi(2) + s[(1, 2)].powi(2) + s[(2, 0)].powi(2));
    (normal + shear).max(0.0).sqrt()
}

pub(crate) fn node_vectors(mesh: &Mesh, u: &[f64]) -> Vec<Vector3<f64>> {
    let dim = mesh.dimension();
    (0..mesh.node_count())
        .map(|n| {
            let mut v = Vector3::zeros();
            for c in 0..dim {
                v[c] = u[dim * n + c];
            }
            v
        })
        .collect()
}

/// Element displacement gradient `H_e = Σ_a u_a ⊗ ∇λ_a`.
pub(crate) fn element_gradient(mesh: &Mesh, e: usize, u: &[Vector3<f64>]) -> Result<Matrix3<f64>, FemError> {
    let dim = mesh.dimension();
    let ue: Vec<[f64; 3]> = mesh.element(e).iter().map(|&n| u[n].into()).collect();
    exact::displacement_gradient(&mesh.element_coords(e)[..dim + 1], dim, &ue).map_err(|_| FemError::DegenerateElement(Some(e)))
}

/// Constant strain `ε = sym(∇u)` per element, `σ = C : ε`.
pub fn recover_stress(mesh: &Mesh, material: &Material, displacement: &[[f64; 3]]) -> Result<StressField, FemError> {
    if displacement.len() != mesh.node_count() {
        return Err(FemError::Mismatch(format!(
            "displacement has {} entries for {} nodes",
            displacement.len(),
            mesh.node_count()
        )));
    }
    let u: Vec<Vector3<f64>> = displacement.iter().map(|d| Vector3::from(*d)).collect();
    let mut stress = Vec::with_capacity(mesh.element_count());
    for e in 0..mesh.element_count() {
        let h = element_gradient(mesh, e, &u)?;
        let strain = 0.5 * (h + h.transpose());
        stress.push(material.stress(mesh.dimension(), &strain));
    }
    let von_mises = stress.iter().map(von_mises).collect();
    Ok(StressField { stress, von_mises })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniaxial_equals_axial_stress() {
        let s = Matrix3::new(125e6, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(von_mises(&s), 125e6);
    }

    #[test]
    fn hydrostatic_is_zero() {
        let s = Matrix3::from_diagonal_element(7.3e7);
        assert!(von_mises(&s) <= 1e-9 * 7.3e7);
    }

    #[test]
    fn pure_shear_is_root_three_tau() {
        let tau = 4.2e7;
        let s = Matrix3::new(0.0, tau, 0.0, tau, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!((von_mises(&s) - 3f64.sqrt() * tau).abs() <= 1e-12 * tau);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let mesh = crate::mesh::fixtures::unit_cube();
        let r = recover_stress(&mesh, &Material::default(), &[[0.0; 3]; 3]);
        assert!(matches!(r, Err(FemError::Mismatch(_))));
    }
}
