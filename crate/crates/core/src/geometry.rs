//! Small dense geometry helpers for linear simplices.
//!
//! Points are stored as `[f64; 3]` everywhere (z = 0 for planar meshes) and
//! promoted to `nalgebra` types only inside computations.

use nalgebra::{Matrix2, Matrix3, Vector3};

pub type Point = [f64; 3];

#[inline]
pub fn vec3(p: &Point) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Vector3<f64> {
    Vector3::new(a[0] - b[0], a[1] - b[1], a[2] - b[2])
}

pub fn distance(a: &Point, b: &Point) -> f64 {
    sub(a, b).norm()
}

/// Geometric data of one linear simplex (triangle or tetrahedron).
///
/// `grads[a]` is the constant gradient of the barycentric coordinate of local
/// node `a`; only the first `dim + 1` entries are meaningful. `measure` is the
/// signed area times thickness (2D) or signed volume (3D).
#[derive(Debug, Clone, Copy)]
pub struct Simplex {
    pub dim: usize,
    pub measure: f64,
    pub grads: [Vector3<f64>; 4],
}

impl Simplex {
    /// Returns `None` when the simplex is degenerate (zero measure).
    pub fn new(coords: &[Point], dim: usize, thickness: f64) -> Option<Simplex> {
        let mut grads = [Vector3::zeros(); 4];
        let measure = match dim {
            2 => {
                let e1 = sub(&coords[1], &coords[0]);
                let e2 = sub(&coords[2], &coords[0]);
                let m = Matrix2::new(e1.x, e2.x, e1.y, e2.y);
                let det = m.determinant();
                if det == 0.0 || !det.is_finite() {
                    return None;
                }
                let inv = Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det;
                for a in 0..2 {
                    grads[a + 1] = Vector3::new(inv[(a, 0)], inv[(a, 1)], 0.0);
                }
                0.5 * det * thickness
            }
            3 => {
                let m = Matrix3::from_columns(&[
                    sub(&coords[1], &coords[0]),
                    sub(&coords[2], &coords[0]),
                    sub(&coords[3], &coords[0]),
                ]);
                let det = m.determinant();
                if det == 0.0 || !det.is_finite() {
                    return None;
                }
                let inv = m.try_inverse()?;
                for a in 0..3 {
                    grads[a + 1] = Vector3::new(inv[(a, 0)], inv[(a, 1)], inv[(a, 2)]);
                }
                det / 6.0
            }
            _ => return None,
        };
        let mut sum = Vector3::zeros();
        for g in &grads[1..=dim] {
            sum += g;
        }
        grads[0] = -sum;
        Some(Simplex { dim, measure, grads })
    }

    pub fn nodes(&self) -> usize {
        self.dim + 1
    }

    pub fn grads(&self) -> &[Vector3<f64>] {
        &self.grads[..self.dim + 1]
    }

    /// Displacement gradient `H = Σ_a u_a ⊗ ∇λ_a` for per-node vectors `u`.
    pub fn displacement_gradient(&self, u: &[Vector3<f64>]) -> Matrix3<f64> {
        let mut h = Matrix3::zeros();
        for (ua, ga) in u.iter().zip(self.grads()) {
            h += ua * ga.transpose();
        }
        h
    }
}

/// Signed measure without constructing gradients (det / d!, times thickness in 2D).
pub fn signed_measure(coords: &[Point], dim: usize, thickness: f64) -> f64 {
    match dim {
        2 => {
            let e1 = sub(&coords[1], &coords[0]);
            let e2 = sub(&coords[2], &coords[0]);
            0.5 * (e1.x * e2.y - e1.y * e2.x) * thickness
        }
        3 => {
            let e1 = sub(&coords[1], &coords[0]);
            let e2 = sub(&coords[2], &coords[0]);
            let e3 = sub(&coords[3], &coords[0]);
            e1.dot(&e2.cross(&e3)) / 6.0
        }
        _ => 0.0,
    }
}

/// Radius-ratio quality normalized so the regular simplex scores 1.
///
/// Triangles: `2 r / R`; tetrahedra: `3 r / R`. Degenerate or inverted
/// simplices score 0.
pub fn radius_ratio(coords: &[Point], dim: usize) -> f64 {
    match dim {
        2 => {
            let a = distance(&coords[1], &coords[2]);
            let b = distance(&coords[0], &coords[2]);
            let c = distance(&coords[0], &coords[1]);
            let area = 0.5 * sub(&coords[1], &coords[0]).cross(&sub(&coords[2], &coords[0])).z;
            if area <= 0.0 {
                return 0.0;
            }
            let r_in = 2.0 * area / (a + b + c);
            let r_circ = a * b * c / (4.0 * area);
            (2.0 * r_in / r_circ).min(1.0)
        }
        3 => {
            let vol = signed_measure(coords, 3, 1.0);
            if vol <= 0.0 {
                return 0.0;
            }
            let faces = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];
            let surface: f64 = faces
                .iter()
                .map(|f| triangle_area(&coords[f[0]], &coords[f[1]], &coords[f[2]]))
                .sum();
            let r_in = 3.0 * vol / surface;
            let e1 = sub(&coords[1], &coords[0]);
            let e2 = sub(&coords[2], &coords[0]);
            let e3 = sub(&coords[3], &coords[0]);
            let m = Matrix3::from_rows(&[e1.transpose(), e2.transpose(), e3.transpose()]);
            let rhs = 0.5 * Vector3::new(e1.norm_squared(), e2.norm_squared(), e3.norm_squared());
            let Some(center) = m.lu().solve(&rhs) else {
                return 0.0;
            };
            let r_circ = center.norm();
            (3.0 * r_in / r_circ).min(1.0)
        }
        _ => 0.0,
    }
}

pub fn triangle_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * sub(b, a).cross(&sub(c, a)).norm()
}

/// Area vector `½ (b − a) × (c − a)` of a triangle.
pub fn triangle_area_vector(a: &Point, b: &Point, c: &Point) -> Vector3<f64> {
    0.5 * sub(b, a).cross(&sub(c, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    const REF_TET: [Point; 4] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    #[test]
    fn reference_tet_measure_and_gradients() {
        let s = Simplex::new(&REF_TET, 3, 1.0).unwrap();
        assert!((s.measure - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(s.grads[1], Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(s.grads[0], Vector3::new(-1.0, -1.0, -1.0));
    }

    #[test]
    fn regular_simplices_score_one() {
        let s3 = 3f64.sqrt();
        let tri = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, s3 / 2.0, 0.0]];
        assert!((radius_ratio(&tri, 2) - 1.0).abs() < 1e-12);
        let tet = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let mut tet = tet;
        if signed_measure(&tet, 3, 1.0) < 0.0 {
            tet.swap(2, 3);
        }
        assert!((radius_ratio(&tet, 3) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_simplex_is_rejected() {
        let flat = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert!(Simplex::new(&flat, 3, 1.0).is_none());
        assert_eq!(radius_ratio(&flat, 3), 0.0);
    }
}
