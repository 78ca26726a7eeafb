use nalgebra::Vector3;

use super::{local_facet_nodes, FacetRef, Mesh, MeshError};
use crate::geometry;

/// An element facet lying on the boundary, with outward-ordered nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFacet {
    pub facet: FacetRef,
    pub nodes: Vec<usize>,
}

impl BoundaryFacet {
    /// Outward area vector: `½ (b−a)×(c−a)` for triangles, or
    /// `thickness · (Δy, −Δx)` for edges of planar meshes.
    pub fn area_vector(&self, mesh: &Mesh) -> Vector3<f64> {
        let p = mesh.nodes();
        if mesh.dimension() == 3 {
            geometry::triangle_area_vector(&p[self.nodes[0]], &p[self.nodes[1]], &p[self.nodes[2]])
        } else {
            let d = geometry::sub(&p[self.nodes[1]], &p[self.nodes[0]]);
            mesh.thickness() * Vector3::new(d.y, -d.x, 0.0)
        }
    }
}

/// Every element facet grouped by its (sorted) node key, in key order.
pub(crate) fn facet_groups(mesh: &Mesh) -> Vec<(Vec<usize>, Vec<FacetRef>)> {
    let dim = mesh.dimension();
    let k = mesh.nodes_per_element();
    let mut all: Vec<(Vec<usize>, FacetRef)> = Vec::with_capacity(mesh.element_count() * k);
    for (e, el) in mesh.elements().enumerate() {
        for local in 0..k {
            let mut key: Vec<usize> = local_facet_nodes(dim, local).iter().map(|&l| el[l]).collect();
            key.sort_unstable();
            all.push((key, FacetRef { element: e, local }));
        }
    }
    all.sort();
    let mut groups: Vec<(Vec<usize>, Vec<FacetRef>)> = Vec::new();
    for (key, f) in all {
        match groups.last_mut() {
            Some((k, refs)) if *k == key => refs.push(f),
            _ => groups.push((key, vec![f])),
        }
    }
    groups
}

/// Facets incident to exactly one element, ordered by (element, local facet).
///
/// Fails if any facet is shared by more than two elements.
pub fn extract_boundary(mesh: &Mesh) -> Result<Vec<BoundaryFacet>, MeshError> {
    let mut out = Vec::new();
    for (key, refs) in facet_groups(mesh) {
        match refs.len() {
            1 => out.push(BoundaryFacet {
                facet: refs[0],
                nodes: mesh.facet_nodes(refs[0]),
            }),
            2 => {}
            count => return Err(MeshError::NonManifold { nodes: key, count }),
        }
    }
    out.sort_by_key(|b| b.facet);
    Ok(out)
}

/// Sorted, deduplicated node indices touched by the boundary.
pub(crate) fn boundary_nodes(facets: &[BoundaryFacet]) -> Vec<usize> {
    let mut nodes: Vec<usize> = facets.iter().flat_map(|f| f.nodes.iter().copied()).collect();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures;
    use std::collections::BTreeMap;

    fn ref_tet() -> Mesh {
        Mesh::new(
            3,
            1.0,
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            vec![0, 1, 2, 3],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn single_tet_has_four_outward_facets() {
        let mesh = ref_tet();
        let b = extract_boundary(&mesh).unwrap();
        assert_eq!(b.len(), 4);
        let centroid = nalgebra::Vector3::new(0.25, 0.25, 0.25);
        for f in &b {
            let fc: nalgebra::Vector3<f64> =
                f.nodes.iter().map(|&n| geometry::vec3(&mesh.nodes()[n])).sum::<nalgebra::Vector3<f64>>() / 3.0;
            assert!(f.area_vector(&mesh).dot(&(fc - centroid)) > 0.0);
        }
    }

    #[test]
    fn unit_cube_has_twelve_boundary_triangles() {
        let cube = fixtures::unit_cube();
        let b = extract_boundary(&cube).unwrap();
        assert_eq!(b.len(), 12);
    }

    #[test]
    fn glued_tets_exclude_shared_face() {
        let mut mesh = Mesh::from_raw(
            3,
            1.0,
            vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 1.0, 1.0],
            ],
            vec![0, 1, 2, 3, 1, 2, 3, 4],
            vec![],
        );
        mesh.repair_orientation();
        assert!(crate::mesh::validate(&mesh).is_valid);
        // Brute-force incidence count over all element facets.
        let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for el in mesh.elements() {
            for skip in 0..4 {
                let mut key: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| el[i]).collect();
                key.sort();
                *count.entry(key).or_default() += 1;
            }
        }
        let expected = count.values().filter(|&&c| c == 1).count();
        let b = extract_boundary(&mesh).unwrap();
        assert_eq!(expected, 6);
        assert_eq!(b.len(), 6);
        assert!(b.iter().all(|f| {
            let mut k = f.nodes.clone();
            k.sort();
            k != vec![1, 2, 3]
        }));
    }

    #[test]
    fn non_manifold_facet_is_an_error() {
        let nodes = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [1.0, 1.0, 1.0],
        ];
        // Three tets sharing face (0,1,2).
        let mesh = Mesh::from_raw(3, 1.0, nodes, vec![0, 1, 2, 3, 0, 2, 1, 4, 0, 1, 2, 5], vec![]);
        assert!(matches!(extract_boundary(&mesh), Err(MeshError::NonManifold { count: 3, .. })));
    }

    #[test]
    fn boundary_is_edge_manifold_for_lug() {
        let lug = fixtures::make_fixture("lug3d", &Default::default()).unwrap();
        let b = extract_boundary(&lug).unwrap();
        let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in &b {
            for i in 0..3 {
                let (a, c) = (f.nodes[i], f.nodes[(i + 1) % 3]);
                *edges.entry((a.min(c), a.max(c))).or_default() += 1;
            }
        }
        assert!(edges.values().all(|&c| c == 2));
    }
}
