use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::SurfaceModel;
use crate::geometry::{distance, Point};

/// Vertices closer than this (source units, m) are treated as one.
pub const WELD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDefect {
    pub endpoints: [Point; 2],
    /// Number of triangles using the edge (≠ 2).
    pub incidence: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldReport {
    pub watertight: bool,
    pub edge_defects: Vec<EdgeDefect>,
    pub winding_consistent: bool,
    /// Always false: self-intersections are not searched for.
    pub self_intersection_checked: bool,
}

/// Maps each triangle corner to a welded vertex id.
fn weld(surface: &SurfaceModel, tol: f64) -> (Vec<Point>, Vec<[usize; 3]>) {
    let cell = |p: &Point| p.map(|c| (c / tol).floor() as i64);
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut points: Vec<Point> = Vec::new();
    let mut tris = Vec::with_capacity(surface.len());
    for t in &surface.triangles {
        let mut ids = [0; 3];
        for (k, p) in t.vertices.iter().enumerate() {
            let c = cell(p);
            let mut found: Option<usize> = None;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(list) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                            for &i in list {
                                if distance(&points[i], p) <= tol && found.is_none_or(|f| i < f) {
                                    found = Some(i);
                                }
                            }
                        }
                    }
                }
            }
            ids[k] = found.unwrap_or_else(|| {
                points.push(*p);
                grid.entry(c).or_default().push(points.len() - 1);
                points.len() - 1
            });
        }
        tris.push(ids);
    }
    (points, tris)
}

/// Edge incidence on welded vertices. Watertight iff every edge has exactly
/// two triangles; winding is consistent iff those two traverse it in
/// opposite directions.
pub fn check_manifold(surface: &SurfaceModel) -> ManifoldReport {
    let (points, tris) = weld(surface, WELD_TOLERANCE);
    // (forward, backward) traversals keyed by the sorted endpoint pair.
    let mut edges: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for t in &tris {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if a == b {
                continue;
            }
            let e = edges.entry((a.min(b), a.max(b))).or_default();
            if a < b {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    let mut winding_consistent = true;
    let mut edge_defects = Vec::new();
    for (&(a, b), &(fwd, bwd)) in &edges {
        if fwd + bwd == 2 {
            winding_consistent &= fwd == 1;
        } else {
            edge_defects.push(EdgeDefect {
                endpoints: [points[a], points[b]],
                incidence: fwd + bwd,
            });
        }
    }
    ManifoldReport {
        watertight: edge_defects.is_empty(),
        edge_defects,
        winding_consistent,
        self_intersection_checked: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::export::surface_mesh;
    use crate::mesh::fixtures::unit_cube;
    use crate::mesh::make_fixture;

    #[test]
    fn closed_cube() {
        let r = check_manifold(&surface_mesh(&unit_cube()).unwrap());
        assert!(r.watertight && r.winding_consistent);
        assert!(!r.self_intersection_checked);
    }

    #[test]
    fn missing_triangle_leaves_three_open_edges() {
        let mut s = surface_mesh(&unit_cube()).unwrap();
        s.triangles.remove(5);
        let r = check_manifold(&s);
        assert!(!r.watertight);
        assert_eq!(r.edge_defects.len(), 3);
        assert!(r.edge_defects.iter().all(|d| d.incidence == 1));
    }

    #[test]
    fn flipped_triangle_breaks_winding_only() {
        let mut s = surface_mesh(&unit_cube()).unwrap();
        s.triangles[3].vertices.swap(1, 2);
        let r = check_manifold(&s);
        assert!(r.watertight);
        assert!(!r.winding_consistent);
    }

    #[test]
    fn near_coincident_vertices_are_welded() {
        let mut s = surface_mesh(&unit_cube()).unwrap();
        for t in &mut s.triangles {
            for v in &mut t.vertices {
                v[0] += 1e-12 * (v[1] - 0.5);
            }
        }
        assert!(check_manifold(&s).watertight);
    }

    #[test]
    fn lug_surface_is_closed() {
        let r = check_manifold(&surface_mesh(&make_fixture("lug3d", &Default::default()).unwrap()).unwrap());
        assert!(r.watertight && r.winding_consistent);
    }
}
