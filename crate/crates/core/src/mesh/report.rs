use serde::{Deserialize, Serialize};

use super::boundary::facet_groups;
use super::{Mesh, MeshError, RegionMembers, DUPLICATE_NODE_TOLERANCE};
use crate::geometry;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshReport {
    /// m³; area × thickness for planar meshes.
    pub volume: f64,
    /// m²; lateral area (perimeter × thickness) for planar meshes.
    pub surface_area: f64,
    pub min_quality: f64,
    pub worst_element: usize,
    pub is_valid: bool,
    pub messages: Vec<String>,
}

/// Checks every mesh invariant and reports all violations. Measures are
/// filled in on a best-effort basis even for invalid meshes.
pub fn validate(mesh: &Mesh) -> MeshReport {
    let mut messages = Vec::new();
    let dim = mesh.dimension();
    if dim != 2 && dim != 3 {
        messages.push(format!("dimension must be 2 or 3, got {dim}"));
        return MeshReport {
            volume: 0.0,
            surface_area: 0.0,
            min_quality: 0.0,
            worst_element: 0,
            is_valid: false,
            messages,
        };
    }
    if dim == 2 && !(mesh.thickness() > 0.0 && mesh.thickness().is_finite()) {
        messages.push(format!("thickness must be positive, got {}", mesh.thickness()));
    }
    let k = mesh.nodes_per_element();
    if mesh.connectivity().len() % k != 0 {
        messages.push(format!("connectivity length {} is not a multiple of {k}", mesh.connectivity().len()));
        return MeshReport {
            volume: 0.0,
            surface_area: 0.0,
            min_quality: 0.0,
            worst_element: 0,
            is_valid: false,
            messages,
        };
    }
    if mesh.element_count() == 0 {
        messages.push("mesh has no elements".to_string());
    }
    let n = mesh.node_count();
    for (i, p) in mesh.nodes().iter().enumerate() {
        if p.iter().any(|c| !c.is_finite()) {
            messages.push(format!("node {i} has non-finite coordinates"));
        } else if dim == 2 && p[2] != 0.0 {
            messages.push(format!("node {i} of a planar mesh has z = {}", p[2]));
        }
    }

    let mut indices_ok = true;
    for (e, el) in mesh.elements().enumerate() {
        if let Some(&bad) = el.iter().find(|&&i| i >= n) {
            messages.push(format!("element {e} references node {bad} out of range (node count {n})"));
            indices_ok = false;
        }
    }

    let mut volume = 0.0;
    let mut min_quality = f64::INFINITY;
    let mut worst_element = 0;
    if indices_ok {
        for e in 0..mesh.element_count() {
            let v = mesh.element_measure(e);
            volume += v;
            if v < 0.0 {
                messages.push(format!("element {e} is inverted (signed measure {v:e})"));
            } else if v == 0.0 {
                messages.push(format!("element {e} is degenerate"));
            }
            let q = mesh.element_quality(e);
            if q < min_quality {
                min_quality = q;
                worst_element = e;
            }
        }
        let mut used = vec![false; n];
        for &i in mesh.connectivity() {
            used[i] = true;
        }
        let orphans: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
        if !orphans.is_empty() {
            messages.push(format!("orphan nodes {orphans:?}"));
        }
    }
    if !min_quality.is_finite() {
        min_quality = 0.0;
    }

    for (a, b) in duplicate_pairs(mesh.nodes()) {
        messages.push(format!("duplicate nodes {a} and {b}"));
    }

    let mut surface_area = 0.0;
    let mut boundary = std::collections::BTreeSet::new();
    if indices_ok {
        for (key, refs) in facet_groups(mesh) {
            match refs.len() {
                1 => {
                    boundary.insert(refs[0]);
                    let p = mesh.nodes();
                    surface_area += if dim == 3 {
                        geometry::triangle_area(&p[key[0]], &p[key[1]], &p[key[2]])
                    } else {
                        geometry::distance(&p[key[0]], &p[key[1]]) * mesh.thickness()
                    };
                }
                2 => {}
                c => messages.push(format!("non-manifold facet {key:?} shared by {c} elements")),
            }
        }
    }

    for region in mesh.regions() {
        match &region.members {
            RegionMembers::Nodes(nodes) => {
                if !nodes.windows(2).all(|w| w[0] < w[1]) {
                    messages.push(format!("region `{}` members are not sorted and unique", region.name));
                }
                if let Some(bad) = nodes.iter().find(|&&i| i >= n) {
                    messages.push(format!("region `{}` references node {bad} out of range", region.name));
                }
            }
            RegionMembers::Facets(facets) => {
                if !facets.windows(2).all(|w| w[0] < w[1]) {
                    messages.push(format!("region `{}` members are not sorted and unique", region.name));
                }
                for f in facets {
                    if f.element >= mesh.element_count() || f.local >= k {
                        messages.push(format!(
                            "region `{}` references facet ({}, {}) out of range",
                            region.name, f.element, f.local
                        ));
                    } else if indices_ok && !boundary.contains(f) {
                        messages.push(format!(
                            "region `{}` facet ({}, {}) is not a boundary facet",
                            region.name, f.element, f.local
                        ));
                    }
                }
            }
        }
    }

    MeshReport {
        volume,
        surface_area,
        min_quality,
        worst_element,
        is_valid: messages.is_empty(),
        messages,
    }
}

/// Volume, surface area and quality of a valid mesh.
pub fn measure(mesh: &Mesh) -> Result<MeshReport, MeshError> {
    let report = validate(mesh);
    if report.is_valid {
        Ok(report)
    } else {
        Err(MeshError::Invalid(report.messages))
    }
}

/// Pairs of nodes closer than the duplicate tolerance, via an x-sorted sweep.
fn duplicate_pairs(nodes: &[[f64; 3]]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].iter().all(|c| c.is_finite())).collect();
    order.sort_by(|&a, &b| nodes[a][0].total_cmp(&nodes[b][0]).then(a.cmp(&b)));
    let mut pairs = Vec::new();
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if nodes[b][0] - nodes[a][0] > DUPLICATE_NODE_TOLERANCE {
                break;
            }
            if geometry::distance(&nodes[a], &nodes[b]) <= DUPLICATE_NODE_TOLERANCE {
                pairs.push((a.min(b), a.max(b)));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures;

    fn ref_tet_nodes() -> Vec<[f64; 3]> {
        vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    }

    #[test]
    fn reference_tet_is_valid() {
        let mesh = Mesh::from_raw(3, 1.0, ref_tet_nodes(), vec![0, 1, 2, 3], vec![]);
        let r = validate(&mesh);
        assert!(r.is_valid);
        assert!(r.messages.is_empty());
        assert!((r.volume - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn swapped_nodes_report_inverted_element() {
        let mesh = Mesh::from_raw(3, 1.0, ref_tet_nodes(), vec![0, 1, 3, 2], vec![]);
        let r = validate(&mesh);
        assert!(!r.is_valid);
        assert!(r.messages.iter().any(|m| m.contains("element 0 is inverted")));
    }

    #[test]
    fn coincident_nodes_are_listed() {
        let mut nodes = ref_tet_nodes();
        nodes.push([1.0, 0.0, 0.0]);
        let mesh = Mesh::from_raw(3, 1.0, nodes, vec![0, 1, 2, 3, 4, 2, 3, 0], vec![]);
        let r = validate(&mesh);
        assert!(r.messages.iter().any(|m| m == "duplicate nodes 1 and 4"), "{:?}", r.messages);
    }

    #[test]
    fn unit_cube_volume_is_exact() {
        let r = measure(&fixtures::unit_cube()).unwrap();
        assert!((r.volume - 1.0).abs() < 1e-12);
        assert!((r.surface_area - 6.0).abs() < 1e-12);
    }

    #[test]
    fn volume_is_sum_of_element_measures() {
        let mesh = fixtures::make_fixture("lug3d", &Default::default()).unwrap();
        let r = measure(&mesh).unwrap();
        let sum: f64 = (0..mesh.element_count()).map(|e| mesh.element_measure(e)).sum();
        assert!((r.volume - sum).abs() <= 1e-12 * sum);
        assert!(r.min_quality > 0.0 && r.min_quality <= 1.0);
    }

    #[test]
    fn plate_with_hole_volume_converges() {
        let params = [("n".to_string(), 32.0)].into_iter().collect();
        let mesh = fixtures::make_fixture("plate_with_hole2d", &params).unwrap();
        let (l, w, r, t) = (0.1, 0.05, 0.01, 0.005);
        let exact = (l * w - std::f64::consts::PI * r * r) * t;
        // Brute-force oracle: shoelace area of each triangle, independent of
        // the mesh's own measure routine.
        let brute: f64 = mesh
            .elements()
            .map(|el| {
                let p: Vec<_> = el.iter().map(|&i| mesh.nodes()[i]).collect();
                0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
            })
            .sum::<f64>()
            * t;
        let v = measure(&mesh).unwrap().volume;
        assert!((v - brute).abs() < 1e-15);
        assert!((v - exact).abs() / exact < 0.02);
    }
}
