use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::FemError;
use crate::geometry;
use crate::mesh::{FacetRef, Mesh, RegionMembers};

fn all_fixed() -> [bool; 3] {
    [true; 3]
}

/// Prescribed displacement on a region's nodes. Components with `fixed[i]`
/// false are left free. A pin is `fixed = [true; 3]`, `value = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletBc {
    pub region: String,
    #[serde(default = "all_fixed")]
    pub fixed: [bool; 3],
    /// m
    #[serde(default)]
    pub value: [f64; 3],
}

impl DirichletBc {
    pub fn pin(region: impl Into<String>) -> Self {
        DirichletBc {
            region: region.into(),
            fixed: [true; 3],
            value: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadKind {
    /// Resultant force in N, spread over the region's facets in proportion
    /// to facet area.
    TotalForce([f64; 3]),
    /// Traction magnitude in Pa along each facet's outward normal; negative
    /// values push into the body.
    Pressure(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeumannLoad {
    pub region: String,
    #[serde(flatten)]
    pub kind: LoadKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadCase {
    #[serde(default)]
    pub dirichlet: Vec<DirichletBc>,
    #[serde(default)]
    pub neumann: Vec<NeumannLoad>,
}

impl LoadCase {
    pub fn new(dirichlet: Vec<DirichletBc>, neumann: Vec<NeumannLoad>) -> Self {
        LoadCase { dirichlet, neumann }
    }

    /// Pins `pin` and applies `force` (N) on `load`.
    pub fn pinned_with_force(pin: &str, load: &str, force: [f64; 3]) -> Self {
        LoadCase {
            dirichlet: vec![DirichletBc::pin(pin)],
            neumann: vec![NeumannLoad {
                region: load.to_string(),
                kind: LoadKind::TotalForce(force),
            }],
        }
    }

    /// Every load multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for n in &mut out.neumann {
            n.kind = match n.kind {
                LoadKind::TotalForce(f) => LoadKind::TotalForce(f.map(|c| alpha * c)),
                LoadKind::Pressure(p) => LoadKind::Pressure(alpha * p),
            };
        }
        out
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<(), FemError> {
        for bc in &self.dirichlet {
            mesh.region(&bc.region)?;
            if bc.value.iter().any(|v| !v.is_finite()) {
                return Err(FemError::Load(format!("non-finite prescribed value on `{}`", bc.region)));
            }
        }
        for load in &self.neumann {
            let region = mesh.region(&load.region)?;
            if !matches!(region.members, RegionMembers::Facets(_)) {
                return Err(FemError::Load(format!(
                    "neumann region `{}` must be a facet set",
                    load.region
                )));
            }
            let finite = match load.kind {
                LoadKind::TotalForce(f) => f.iter().all(|c| c.is_finite()),
                LoadKind::Pressure(p) => p.is_finite(),
            };
            if !finite {
                return Err(FemError::Load(format!("non-finite load on `{}`", load.region)));
            }
        }
        Ok(())
    }
}

/// Prescribed value per dof (`None` = free). Later conditions override
/// earlier ones on shared dofs.
pub(crate) fn constrained_dofs(mesh: &Mesh, loads: &LoadCase) -> Result<Vec<Option<f64>>, FemError> {
    let dim = mesh.dimension();
    let mut out = vec![None; mesh.dof_count()];
    for bc in &loads.dirichlet {
        for n in mesh.region_nodes(&bc.region)? {
            for c in 0..dim {
                if bc.fixed[c] {
                    out[dim * n + c] = Some(bc.value[c]);
                }
            }
        }
    }
    Ok(out)
}

/// Outward area vector of a facet (see `BoundaryFacet::area_vector`).
pub(crate) fn facet_area_vector(mesh: &Mesh, nodes: &[usize]) -> Vector3<f64> {
    let p = mesh.nodes();
    if mesh.dimension() == 3 {
        geometry::triangle_area_vector(&p[nodes[0]], &p[nodes[1]], &p[nodes[2]])
    } else {
        let d = geometry::sub(&p[nodes[1]], &p[nodes[0]]);
        mesh.thickness() * Vector3::new(d.y, -d.x, 0.0)
    }
}

/// Gradient of `w · a(x)` with respect to each facet node, `a` the outward
/// area vector and `w` held fixed.
fn area_vector_gradient(mesh: &Mesh, nodes: &[usize], w: &Vector3<f64>) -> Vec<Vector3<f64>> {
    let p = mesh.nodes();
    if mesh.dimension() == 3 {
        let x = |i: usize| geometry::vec3(&p[nodes[i]]);
        vec![
            0.5 * w.cross(&(x(2) - x(1))),
            0.5 * w.cross(&(x(0) - x(2))),
            0.5 * w.cross(&(x(1) - x(0))),
        ]
    } else {
        let t = mesh.thickness();
        vec![t * Vector3::new(w.y, -w.x, 0.0), t * Vector3::new(-w.y, w.x, 0.0)]
    }
}

fn facets_with_nodes(mesh: &Mesh, facets: &[FacetRef]) -> Vec<Vec<usize>> {
    facets.iter().map(|&f| mesh.facet_nodes(f)).collect()
}

/// Consistent nodal load vector (length = dof count).
pub fn load_vector(mesh: &Mesh, loads: &LoadCase) -> Result<Vec<f64>, FemError> {
    loads.validate(mesh)?;
    let dim = mesh.dimension();
    let mut f = vec![0.0; mesh.dof_count()];
    for load in &loads.neumann {
        let facets = facets_with_nodes(mesh, mesh.region_facets(&load.region)?);
        let nf = dim as f64;
        match load.kind {
            LoadKind::Pressure(pressure) => {
                for nodes in &facets {
                    let a = facet_area_vector(mesh, nodes);
                    for &n in nodes {
                        for c in 0..dim {
                            f[dim * n + c] += pressure * a[c] / nf;
                        }
                    }
                }
            }
            LoadKind::TotalForce(force) => {
                let areas: Vec<f64> = facets.iter().map(|n| facet_area_vector(mesh, n).norm()).collect();
                let total: f64 = areas.iter().sum();
                if total <= 0.0 {
                    return Err(FemError::Load(format!("region `{}` has zero area", load.region)));
                }
                for (nodes, area) in facets.iter().zip(&areas) {
                    let share = area / (total * nf);
                    for &n in nodes {
                        for c in 0..dim {
                            f[dim * n + c] += force[c] * share;
                        }
                    }
                }
            }
        }
    }
    Ok(f)
}

/// Gradient of `wᵀ f(x)` with respect to node coordinates, for a fixed
/// vector `w` (length = dof count).
pub(crate) fn load_sensitivity(mesh: &Mesh, loads: &LoadCase, w: &[f64]) -> Result<Vec<Vector3<f64>>, FemError> {
    let dim = mesh.dimension();
    let mut g = vec![Vector3::zeros(); mesh.node_count()];
    let sum_w = |nodes: &[usize]| {
        let mut s = Vector3::zeros();
        for &n in nodes {
            for c in 0..dim {
                s[c] += w[dim * n + c];
            }
        }
        s
    };
    for load in &loads.neumann {
        let facets = facets_with_nodes(mesh, mesh.region_facets(&load.region)?);
        let nf = dim as f64;
        match load.kind {
            LoadKind::Pressure(pressure) => {
                for nodes in &facets {
                    let wbar = sum_w(nodes) * (pressure / nf);
                    for (&n, d) in nodes.iter().zip(area_vector_gradient(mesh, nodes, &wbar)) {
                        g[n] += d;
                    }
                }
            }
            LoadKind::TotalForce(force) => {
                let force = Vector3::from(force);
                let avecs: Vec<Vector3<f64>> = facets.iter().map(|n| facet_area_vector(mesh, n)).collect();
                let areas: Vec<f64> = avecs.iter().map(|a| a.norm()).collect();
                let total: f64 = areas.iter().sum();
                let coef: Vec<f64> = facets.iter().map(|n| force.dot(&sum_w(n)) / nf).collect();
                let j: f64 = coef.iter().zip(&areas).map(|(c, a)| c * a).sum::<f64>() / total;
                for ((nodes, a), c) in facets.iter().zip(&avecs).zip(&coef) {
                    let norm = a.norm();
                    if norm == 0.0 {
                        continue;
                    }
                    let unit = a / norm * ((c - j) / total);
                    for (&n, d) in nodes.iter().zip(area_vector_gradient(mesh, nodes, &unit)) {
                        g[n] += d;
                    }
                }
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_fixture;
    use rand::{Rng, SeedableRng};

    fn resultant(mesh: &Mesh, f: &[f64]) -> [f64; 3] {
        let dim = mesh.dimension();
        let mut r = [0.0; 3];
        for n in 0..mesh.node_count() {
            for c in 0..dim {
                r[c] += f[dim * n + c];
            }
        }
        r
    }

    #[test]
    fn total_force_resultant_is_exact() {
        let mesh = make_fixture("lug3d", &Default::default()).unwrap();
        let loads = LoadCase::pinned_with_force("pin", "load", [110e3, 0.0, 0.0]);
        let f = load_vector(&mesh, &loads).unwrap();
        let r = resultant(&mesh, &f);
        assert!((r[0] - 110e3).abs() < 1e-9 * 110e3);
        assert!(r[1].abs() < 1e-9 && r[2].abs() < 1e-9);
    }

    #[test]
    fn pressure_on_closed_surface_has_zero_resultant() {
        let mut mesh = crate::mesh::fixtures::unit_cube();
        let facets: Vec<FacetRef> = crate::mesh::extract_boundary(&mesh).unwrap().iter().map(|b| b.facet).collect();
        mesh = Mesh::new(
            3,
            1.0,
            mesh.nodes().to_vec(),
            mesh.connectivity().to_vec(),
            vec![crate::mesh::RegionTag::facets("all", facets)],
        )
        .unwrap();
        let loads = LoadCase::new(vec![], vec![NeumannLoad { region: "all".into(), kind: LoadKind::Pressure(5.0) }]);
        let r = resultant(&mesh, &load_vector(&mesh, &loads).unwrap());
        assert!(r.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn neumann_on_node_set_is_rejected() {
        let mesh = make_fixture("bar3d", &Default::default()).unwrap();
        let loads = LoadCase::pinned_with_force("pin", "pin", [1.0, 0.0, 0.0]);
        assert!(matches!(load_vector(&mesh, &loads), Err(FemError::Load(_))));
        let loads = LoadCase::pinned_with_force("pin", "nowhere", [1.0, 0.0, 0.0]);
        assert!(matches!(load_vector(&mesh, &loads), Err(FemError::Mesh(_))));
    }

    /// Central differences of `wᵀ f(x)` against the analytic gradient, for
    /// both load kinds and both dimensions.
    #[test]
    fn load_sensitivity_matches_finite_differences() {
        let cases = [
            ("plate_with_hole2d", LoadKind::Pressure(-3e6)),
            ("plate_with_hole2d", LoadKind::TotalForce([1e3, 2e2, 0.0])),
            ("lug3d", LoadKind::Pressure(2e6)),
            ("lug3d", LoadKind::TotalForce([5e4, -1e4, 3e3])),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (name, kind) in cases {
            let mesh = make_fixture(name, &Default::default()).unwrap();
            let loads = LoadCase::new(vec![], vec![NeumannLoad { region: "load".into(), kind }]);
            let w: Vec<f64> = (0..mesh.dof_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g = load_sensitivity(&mesh, &loads, &w).unwrap();
            let dir: Vec<[f64; 3]> = (0..mesh.node_count())
                .map(|_| {
                    let z = if mesh.dimension() == 3 { rng.random_range(-1.0..1.0) } else { 0.0 };
                    [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), z]
                })
                .collect();
            let h = 1e-7 * 0.1;
            let shifted = |s: f64| {
                let nodes = mesh
                    .nodes()
                    .iter()
                    .zip(&dir)
                    .map(|(p, d)| [p[0] + s * d[0], p[1] + s * d[1], p[2] + s * d[2]])
                    .collect();
                let m = mesh.with_nodes(nodes);
                let f = load_vector(&m, &loads).unwrap();
                f.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>()
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            let an: f64 = g.iter().zip(&dir).map(|(g, d)| g.dot(&Vector3::from(*d))).sum();
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-30), "{name} {kind:?}: fd {fd} vs {an}");
        }
    }
}
