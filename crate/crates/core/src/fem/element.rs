use nalgebra::DMatrix;

use super::{FemError, Material};
use crate::geometry::{Point, Simplex};

/// Constant strain-displacement matrix (Voigt, engineering shear).
pub fn strain_displacement(simplex: &Simplex) -> DMatrix<f64> {
    let dim = simplex.dim;
    let k = simplex.nodes();
    if dim == 2 {
        let mut b = DMatrix::zeros(3, 2 * k);
        for (a, g) in simplex.grads().iter().enumerate() {
            b[(0, 2 * a)] = g.x;
            b[(1, 2 * a + 1)] = g.y;
            b[(2, 2 * a)] = g.y;
            b[(2, 2 * a + 1)] = g.x;
        }
        b
    } else {
        let mut b = DMatrix::zeros(6, 3 * k);
        for (a, g) in simplex.grads().iter().enumerate() {
            let c = 3 * a;
            b[(0, c)] = g.x;
            b[(1, c + 1)] = g.y;
            b[(2, c + 2)] = g.z;
            b[(3, c + 1)] = g.z;
            b[(3, c + 2)] = g.y;
            b[(4, c)] = g.z;
            b[(4, c + 2)] = g.x;
            b[(5, c)] = g.y;
            b[(5, c + 1)] = g.x;
        }
        b
    }
}

/// `K_e = V Bᵀ D B` for a tri3 (plane stress, `thickness`) or tet4 element.
///
/// The lower triangle is mirrored from the upper one so the result is
/// exactly symmetric. Local dof order is node-major: `(node, component)`.
pub fn element_stiffness(
    coords: &[Point],
    material: &Material,
    dim: usize,
    thickness: f64,
) -> Result<DMatrix<f64>, FemError> {
    let simplex = Simplex::new(coords, dim, thickness).ok_or(FemError::DegenerateElement(None))?;
    Ok(stiffness_of(&simplex, material))
}

pub(crate) fn stiffness_of(simplex: &Simplex, material: &Material) -> DMatrix<f64> {
    let b = strain_displacement(simplex);
    let d = material.voigt_matrix(simplex.dim);
    let db = &d * &b;
    let n = b.ncols();
    let vol = simplex.measure.abs();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = vol * b.column(i).dot(&db.column(j));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DVector, Matrix3, Vector3};

    const REF_TET: [Point; 4] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    const SKEW_TET: [Point; 4] = [[0.1, -0.2, 0.05], [1.3, 0.1, -0.1], [0.2, 0.9, 0.3], [-0.1, 0.25, 1.1]];
    const TRI: [Point; 3] = [[0.0, 0.0, 0.0], [2.0, 0.3, 0.0], [0.4, 1.1, 0.0]];

    /// Independent route: shape-function derivatives on the reference
    /// element mapped through the Jacobian, integrated with a 4-point Gauss
    /// rule, and assembled entry-wise from the isotropic tensor form
    /// `K_ab,ij = ∫ λ ∂_i N_a ∂_j N_b + μ ∂_j N_a ∂_i N_b + μ δ_ij ∇N_a·∇N_b`.
    fn quadrature_oracle(coords: &[Point; 4], e: f64, nu: f64) -> DMatrix<f64> {
        let dn_ref = [
            Vector3::new(-1.0, -1.0, -1.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
        ];
        let x = |i: usize| Vector3::new(coords[i][0], coords[i][1], coords[i][2]);
        let mut jac = Matrix3::zeros();
        for a in 0..4 {
            jac += x(a) * dn_ref[a].transpose();
        }
        let det = jac.determinant();
        let jinv_t = jac.try_inverse().unwrap().transpose();
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mu = e / (2.0 * (1.0 + nu));
        let (ga, gb) = (0.585_410_196_624_968_5, 0.138_196_601_125_010_5);
        let points = [[ga, gb, gb], [gb, ga, gb], [gb, gb, ga], [gb, gb, gb]];
        let mut k = DMatrix::zeros(12, 12);
        for _q in points {
            let w = det / 24.0;
            let dn: Vec<Vector3<f64>> = dn_ref.iter().map(|d| jinv_t * d).collect();
            for a in 0..4 {
                for b in 0..4 {
                    for i in 0..3 {
                        for j in 0..3 {
                            let mut v = lambda * dn[a][i] * dn[b][j] + mu * dn[a][j] * dn[b][i];
                            if i == j {
                                v += mu * dn[a].dot(&dn[b]);
                            }
                            k[(3 * a + i, 3 * b + j)] += w * v;
                        }
                    }
                }
            }
        }
        k
    }

    #[test]
    fn reference_tet_matches_quadrature_oracle() {
        let m = Material::smoothing(0.0);
        let k = element_stiffness(&REF_TET, &m, 3, 1.0).unwrap();
        let oracle = quadrature_oracle(&REF_TET, 1.0, 0.0);
        assert!((&k - &oracle).abs().max() < 1e-12);
        let m = Material::default();
        let k = element_stiffness(&SKEW_TET, &m, 3, 1.0).unwrap();
        let oracle = quadrature_oracle(&SKEW_TET, m.youngs_modulus, m.poisson_ratio);
        assert!((&k - &oracle).abs().max() < 1e-12 * oracle.abs().max());
    }

    #[test]
    fn exactly_symmetric() {
        let m = Material::default();
        for k in [
            element_stiffness(&SKEW_TET, &m, 3, 1.0).unwrap(),
            element_stiffness(&TRI, &m, 2, 0.01).unwrap(),
        ] {
            assert_eq!(k, k.transpose());
        }
    }

    fn rigid_modes(coords: &[Point], dim: usize) -> Vec<DVector<f64>> {
        let k = coords.len();
        let mut modes = Vec::new();
        for d in 0..dim {
            let mut v = DVector::zeros(dim * k);
            for a in 0..k {
                v[dim * a + d] = 1.0;
            }
            modes.push(v);
        }
        let rot = |axis: Vector3<f64>| {
            let mut v = DVector::zeros(dim * k);
            for a in 0..k {
                let u = axis.cross(&Vector3::from(coords[a]));
                for d in 0..dim {
                    v[dim * a + d] = u[d];
                }
            }
            v
        };
        if dim == 2 {
            modes.push(rot(Vector3::z()));
        } else {
            modes.extend([rot(Vector3::x()), rot(Vector3::y()), rot(Vector3::z())]);
        }
        modes
    }

    #[test]
    fn nullspace_is_rigid_body_modes() {
        let m = Material::default();
        for (coords, dim, expected) in [(&SKEW_TET[..], 3, 6), (&TRI[..], 2, 3)] {
            let k = element_stiffness(coords, &m, dim, 0.01).unwrap();
            let norm = k.abs().max();
            for mode in rigid_modes(coords, dim) {
                assert!((&k * &mode).abs().max() <= 1e-9 * norm * mode.abs().max());
            }
            let eig = k.clone().symmetric_eigen();
            let zero = eig.eigenvalues.iter().filter(|&&l| l.abs() < 1e-9 * norm).count();
            assert_eq!(zero, expected);
            assert!(eig.eigenvalues.iter().all(|&l| l > -1e-9 * norm));
        }
    }

    #[test]
    fn degenerate_element_is_an_error() {
        let flat = [[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]];
        assert!(matches!(
            element_stiffness(&flat, &Material::default(), 2, 1.0),
            Err(FemError::DegenerateElement(_))
        ));
    }
}
