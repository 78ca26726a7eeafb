use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::ExportError;
use crate::geometry::{sub, vec3, Point};
use crate::mesh::{extract_boundary, Mesh};

/// Meters to millimeters.
pub const DEFAULT_EXPORT_SCALE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceTriangle {
    pub vertices: [Point; 3],
    /// Unit outward normal, consistent with the vertex winding.
    pub normal: [f64; 3],
}

impl SurfaceTriangle {
    /// `½ (b − a) × (c − a)`.
    pub fn area_vector(&self) -> Vector3<f64> {
        let [a, b, c] = &self.vertices;
        0.5 * sub(b, a).cross(&sub(c, a))
    }
}

/// Closed boundary surface in source units (m) with the scale applied on
/// output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceModel {
    pub triangles: Vec<SurfaceTriangle>,
    pub scale: f64,
}

impl SurfaceModel {
    pub fn new(triangles: Vec<SurfaceTriangle>) -> Self {
        SurfaceModel {
            triangles,
            scale: DEFAULT_EXPORT_SCALE,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self, ExportError> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(ExportError::InvalidScale(scale));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| t.area_vector().norm()).sum()
    }

    /// `Σ aᵢ nᵢ`; zero for a closed surface.
    pub fn normal_sum(&self) -> Vector3<f64> {
        self.triangles.iter().map(SurfaceTriangle::area_vector).sum()
    }

    /// Enclosed volume by the divergence theorem, in source units.
    pub fn signed_volume(&self) -> f64 {
        let origin = self.triangles.first().map(|t| vec3(&t.vertices[0])).unwrap_or_default();
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.vertices.map(|p| vec3(&p) - origin);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }
}

/// Boundary facets of a tetrahedral mesh as outward-facing triangles, in
/// boundary-extraction order with vertices copied verbatim.
pub fn surface_mesh(mesh: &Mesh) -> Result<SurfaceModel, ExportError> {
    if mesh.dimension() != 3 {
        return Err(ExportError::NotThreeDimensional(mesh.dimension()));
    }
    let p = mesh.nodes();
    let triangles = extract_boundary(mesh)?
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let vertices = [p[f.nodes[0]], p[f.nodes[1]], p[f.nodes[2]]];
            let n = sub(&vertices[1], &vertices[0]).cross(&sub(&vertices[2], &vertices[0]));
            let len = n.norm();
            if !(len > 0.0) || !len.is_finite() {
                return Err(ExportError::DegenerateTriangle(i));
            }
            let n = n / len;
            Ok(SurfaceTriangle {
                vertices,
                normal: [n.x, n.y, n.z],
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SurfaceModel::new(triangles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::unit_cube;
    use crate::mesh::make_fixture;

    #[test]
    fn cube_has_twelve_axis_aligned_triangles() {
        let s = surface_mesh(&unit_cube()).unwrap();
        assert_eq!(s.len(), 12);
        for t in &s.triangles {
            let nonzero: Vec<f64> = t.normal.iter().copied().filter(|c| *c != 0.0).collect();
            assert_eq!(nonzero.len(), 1, "{:?}", t.normal);
            assert_eq!(nonzero[0].abs(), 1.0);
        }
        assert!((s.signed_volume() - 1.0).abs() < 1e-15);
        assert!((s.area() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn single_tet_surface_is_closed() {
        let mesh = Mesh::new(
            3,
            1.0,
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            vec![0, 1, 2, 3],
            vec![],
        )
        .unwrap();
        let s = surface_mesh(&mesh).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.normal_sum().norm() <= 1e-12);
        for t in &s.triangles {
            assert!((vec3(&t.normal).norm() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn lug_triangle_count_matches_boundary() {
        let mesh = make_fixture("lug3d", &Default::default()).unwrap();
        let s = surface_mesh(&mesh).unwrap();
        assert_eq!(s.len(), extract_boundary(&mesh).unwrap().len());
        assert!((s.signed_volume() - mesh.volume()).abs() <= 1e-9 * mesh.volume());
    }

    #[test]
    fn planar_mesh_is_rejected() {
        let mesh = make_fixture("plate_with_hole2d", &Default::default()).unwrap();
        assert!(matches!(surface_mesh(&mesh), Err(ExportError::NotThreeDimensional(2))));
    }

    #[test]
    fn scale_must_be_positive() {
        let s = surface_mesh(&unit_cube()).unwrap();
        assert!(s.clone().with_scale(0.0).is_err());
        assert_eq!(s.with_scale(25.4).unwrap().scale, 25.4);
    }
}
