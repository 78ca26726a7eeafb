//! Double-double evaluation of the element operator.
//!
//! Assembled stiffness entries carry rounding that does not annihilate rigid
//! motion exactly, so structures with large rigid displacement (slender
//! cantilevers) see spurious forces of order `ε |K| |u|`. Evaluating
//! `K(x) u` element by element in double-double from the exact input
//! coordinates removes that floor when used as the residual of iterative
//! refinement.

use nalgebra::Matrix3;

use super::{FemError, Material};
use crate::dd::{cofactors, Dd, V3};
use crate::geometry::Point;
use crate::mesh::Mesh;

/// `det · H` with `H = Σ_b u_b ⊗ ∇λ_b`.
fn scaled_gradient(c: &[V3; 4], dim: usize, u: &[[f64; 3]]) -> [V3; 3] {
    let mut h = [[Dd::default(); 3]; 3];
    for (b, ub) in u.iter().enumerate().take(dim + 1) {
        for i in 0..dim {
            let ui = Dd::from(ub[i]);
            for j in 0..dim {
                h[i][j] = h[i][j] + ui * c[b][j];
            }
        }
    }
    h
}

/// Displacement gradient of one element, correctly rounded up to the
/// final division.
pub(crate) fn displacement_gradient(coords: &[Point], dim: usize, u: &[[f64; 3]]) -> Result<Matrix3<f64>, FemError> {
    let (c, det) = cofactors(coords, dim);
    if det.0 == 0.0 || !det.0.is_finite() {
        return Err(FemError::DegenerateElement(None));
    }
    let inv = det.recip();
    let h = scaled_gradient(&c, dim, u);
    Ok(Matrix3::from_fn(|i, j| (h[i][j] * inv).value()))
}

/// `f − K(x) u` over all dofs, accumulated in double-double.
pub(crate) fn residual(mesh: &Mesh, material: &Material, f: &[f64], u: &[f64]) -> Result<Vec<f64>, FemError> {
    let dim = mesh.dimension();
    let lambda = Dd::from(material.lambda(dim));
    let two_mu = Dd::from(2.0 * material.shear_modulus());
    let mu = Dd::from(material.shear_modulus());
    let factor = Dd::from(if dim == 2 { mesh.thickness() / 2.0 } else { 1.0 / 6.0 });
    let mut acc: Vec<Dd> = f.iter().map(|&v| Dd::from(v)).collect();
    for e in 0..mesh.element_count() {
        let nodes = mesh.element(e);
        let coords = mesh.element_coords(e);
        let (c, det) = cofactors(&coords[..dim + 1], dim);
        if det.0 == 0.0 || !det.0.is_finite() {
            return Err(FemError::DegenerateElement(Some(e)));
        }
        let ue: Vec<[f64; 3]> = nodes
            .iter()
            .map(|&n| {
                let mut v = [0.0; 3];
                v[..dim].copy_from_slice(&u[dim * n..dim * n + dim]);
                v
            })
            .collect();
        // f_a = V σ ∇λ_a = t/(d! |det|) (det σ) C_a.
        let h = scaled_gradient(&c, dim, &ue);
        let mut tr = Dd::default();
        for i in 0..dim {
            tr = tr + h[i][i];
        }
        let mut s = [[Dd::default(); 3]; 3];
        for i in 0..dim {
            for j in 0..dim {
                s[i][j] = mu * (h[i][j] + h[j][i]);
            }
            s[i][i] = two_mu * h[i][i] + lambda * tr;
        }
        let wgt = factor * (if det.0 < 0.0 { -det } else { det }).recip();
        for (a, &n) in nodes.iter().enumerate() {
            for i in 0..dim {
                let mut fa = Dd::default();
                for j in 0..dim {
                    fa = fa + s[i][j] * c[a][j];
                }
                acc[dim * n + i] = acc[dim * n + i] - wgt * fa;
            }
        }
    }
    Ok(acc.into_iter().map(Dd::value).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assemble;
    use crate::mesh::make_fixture;

    #[test]
    fn residual_agrees_with_assembled_operator() {
        for name in ["plate_with_hole2d", "lug3d"] {
            let mesh = make_fixture(name, &Default::default()).unwrap();
            let material = Material::default();
            let k = assemble(&mesh, &material).unwrap();
            let u: Vec<f64> = (0..mesh.dof_count()).map(|i| 1e-4 * ((i as f64) * 0.37).sin()).collect();
            let f = vec![0.0; u.len()];
            let r = residual(&mesh, &material, &f, &u).unwrap();
            let ku = k.mul_vec(&u);
            let scale = ku.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for (ri, ki) in r.iter().zip(&ku) {
                assert!((ri + ki).abs() <= 1e-10 * scale, "{name}: {ri} vs {ki}");
            }
        }
    }

    #[test]
    fn translation_is_annihilated() {
        let mesh = make_fixture("lug3d", &Default::default()).unwrap();
        let material = Material::default();
        let u: Vec<f64> = (0..mesh.dof_count()).map(|i| [0.3, 0.2, -0.1][i % 3]).collect();
        let r = residual(&mesh, &material, &vec![0.0; u.len()], &u).unwrap();
        let exact = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let assembled = assemble(&mesh, &material).unwrap().mul_vec(&u).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(exact < 1e-20, "{exact:e}");
        assert!(assembled > 1e6 * exact, "{assembled:e}");
    }
}
