//! Simplex meshes: representation, validation, measures, boundary extraction
//! and parametric benchmark fixtures.

mod boundary;
pub mod fixtures;
mod io;
mod report;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dd;
use crate::geometry::{self, Point, Simplex};

pub use boundary::{extract_boundary, BoundaryFacet};
pub use fixtures::make_fixture;
pub use io::{load_mesh, save_mesh};
pub use report::{measure, validate, MeshReport};

/// Nodes closer than this are reported as duplicates.
pub const DUPLICATE_NODE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh parse error: {0}")]
    Parse(String),
    #[error("invalid mesh: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("non-manifold facet {nodes:?} shared by {count} elements")]
    NonManifold { nodes: Vec<usize>, count: usize },
    #[error("unknown region `{0}`")]
    UnknownRegion(String),
    #[error("region `{name}` has kind {found}, expected {expected}")]
    RegionKind {
        name: String,
        found: &'static str,
        expected: &'static str,
    },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("fixture parameter error: {0}")]
    FixtureParams(String),
}

/// Reference to a local facet of an element. Local facet `f` is the face
/// (3D) or edge (2D) opposite local node `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FacetRef {
    pub element: usize,
    pub local: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegionMembers {
    Nodes(Vec<usize>),
    Facets(Vec<FacetRef>),
}

impl RegionMembers {
    pub fn kind_name(&self) -> &'static str {
        match self {
            RegionMembers::Nodes(_) => "nodes",
            RegionMembers::Facets(_) => "facets",
        }
    }
}

/// A named node set or facet set.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTag {
    pub name: String,
    pub members: RegionMembers,
}

impl RegionTag {
    pub fn nodes(name: impl Into<String>, mut nodes: Vec<usize>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        RegionTag {
            name: name.into(),
            members: RegionMembers::Nodes(nodes),
        }
    }

    pub fn facets(name: impl Into<String>, mut facets: Vec<FacetRef>) -> Self {
        facets.sort_unstable();
        facets.dedup();
        RegionTag {
            name: name.into(),
            members: RegionMembers::Facets(facets),
        }
    }
}

/// Local node indices of facet `local` of a simplex with `dim + 1` nodes,
/// ordered so that the right-hand normal points out of a positively oriented
/// element.
pub fn local_facet_nodes(dim: usize, local: usize) -> &'static [usize] {
    const TRI: [[usize; 2]; 3] = [[1, 2], [2, 0], [0, 1]];
    const TET: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];
    if dim == 2 {
        &TRI[local]
    } else {
        &TET[local]
    }
}

/// Linear simplex mesh: tri3 (plane stress, with thickness) or tet4.
///
/// Coordinates are meters; planar meshes keep z = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dimension: usize,
    thickness: f64,
    nodes: Vec<Point>,
    connectivity: Vec<usize>,
    regions: BTreeMap<String, RegionTag>,
}

impl Mesh {
    /// Builds a mesh and checks every invariant; see [`validate`].
    pub fn new(
        dimension: usize,
        thickness: f64,
        nodes: Vec<Point>,
        connectivity: Vec<usize>,
        regions: Vec<RegionTag>,
    ) -> Result<Mesh, MeshError> {
        let mesh = Mesh::from_raw(dimension, thickness, nodes, connectivity, regions);
        let report = validate(&mesh);
        if report.is_valid {
            Ok(mesh)
        } else {
            Err(MeshError::Invalid(report.messages))
        }
    }

    /// Builds a mesh without any checks. The result may violate the mesh
    /// invariants; [`validate`] reports which.
    pub fn from_raw(
        dimension: usize,
        thickness: f64,
        nodes: Vec<Point>,
        connectivity: Vec<usize>,
        regions: Vec<RegionTag>,
    ) -> Mesh {
        let regions = regions.into_iter().map(|r| (r.name.clone(), r)).collect();
        Mesh {
            dimension,
            thickness: if dimension == 2 { thickness } else { 1.0 },
            nodes,
            connectivity,
            regions,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Out-of-plane thickness for planar meshes; 1 for solids.
    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes_per_element(&self) -> usize {
        self.dimension + 1
    }

    pub fn element_count(&self) -> usize {
        self.connectivity.len() / self.nodes_per_element()
    }

    pub fn element(&self, e: usize) -> &[usize] {
        let k = self.nodes_per_element();
        &self.connectivity[e * k..(e + 1) * k]
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.connectivity.chunks_exact(self.nodes_per_element())
    }

    pub fn connectivity(&self) -> &[usize] {
        &self.connectivity
    }

    pub fn dof_count(&self) -> usize {
        self.dimension * self.nodes.len()
    }

    pub fn regions(&self) -> impl Iterator<Item = &RegionTag> {
        self.regions.values()
    }

    pub fn region(&self, name: &str) -> Result<&RegionTag, MeshError> {
        self.regions
            .get(name)
            .ok_or_else(|| MeshError::UnknownRegion(name.to_string()))
    }

    pub fn element_coords(&self, e: usize) -> [Point; 4] {
        let mut out = [[0.0; 3]; 4];
        for (slot, &n) in out.iter_mut().zip(self.element(e)) {
            *slot = self.nodes[n];
        }
        out
    }

    pub fn simplex(&self, e: usize) -> Option<Simplex> {
        let coords = self.element_coords(e);
        Simplex::new(&coords[..self.nodes_per_element()], self.dimension, self.thickness)
    }

    pub fn element_measure(&self, e: usize) -> f64 {
        let coords = self.element_coords(e);
        geometry::signed_measure(&coords[..self.nodes_per_element()], self.dimension, self.thickness)
    }

    pub fn element_quality(&self, e: usize) -> f64 {
        let coords = self.element_coords(e);
        geometry::radius_ratio(&coords[..self.nodes_per_element()], self.dimension)
    }

    /// Total signed measure, accumulated in double-double so that small
    /// shape perturbations resolve cleanly.
    pub fn volume(&self) -> f64 {
        let n = self.nodes_per_element();
        (0..self.element_count())
            .map(|e| dd::signed_measure(&self.element_coords(e)[..n], self.dimension, self.thickness))
            .fold(dd::Dd::default(), |a, b| a + b)
            .value()
    }

    /// Global node indices of an element facet, outward-ordered.
    pub fn facet_nodes(&self, facet: FacetRef) -> Vec<usize> {
        let element = self.element(facet.element);
        local_facet_nodes(self.dimension, facet.local)
            .iter()
            .map(|&l| element[l])
            .collect()
    }

    /// Node set of a region: node-set members directly, or the union of the
    /// facets' nodes for facet sets.
    pub fn region_nodes(&self, name: &str) -> Result<Vec<usize>, MeshError> {
        let region = self.region(name)?;
        Ok(match &region.members {
            RegionMembers::Nodes(n) => n.clone(),
            RegionMembers::Facets(f) => {
                let set: BTreeSet<usize> = f.iter().flat_map(|&fr| self.facet_nodes(fr)).collect();
                set.into_iter().collect()
            }
        })
    }

    pub fn region_facets(&self, name: &str) -> Result<&[FacetRef], MeshError> {
        let region = self.region(name)?;
        match &region.members {
            RegionMembers::Facets(f) => Ok(f),
            other => Err(MeshError::RegionKind {
                name: name.to_string(),
                found: other.kind_name(),
                expected: "facets",
            }),
        }
    }

    /// Same topology and regions, new coordinates. No validation.
    pub fn with_nodes(&self, nodes: Vec<Point>) -> Mesh {
        assert_eq!(nodes.len(), self.nodes.len(), "node count must not change");
        Mesh {
            nodes,
            ..self.clone()
        }
    }

    /// Shortest element edge.
    pub fn min_edge_length(&self) -> f64 {
        let k = self.nodes_per_element();
        let mut min = f64::INFINITY;
        for el in self.elements() {
            for a in 0..k {
                for b in a + 1..k {
                    min = min.min(geometry::distance(&self.nodes[el[a]], &self.nodes[el[b]]));
                }
            }
        }
        min
    }

    /// Swap two local nodes of every negatively oriented element, remapping
    /// facet references. Returns the repaired element indices.
    pub(crate) fn repair_orientation(&mut self) -> Vec<usize> {
        let k = self.nodes_per_element();
        let mut repaired = Vec::new();
        for e in 0..self.element_count() {
            if self.element_measure(e) < 0.0 {
                self.connectivity.swap(e * k + k - 2, e * k + k - 1);
                repaired.push(e);
            }
        }
        if repaired.is_empty() {
            return repaired;
        }
        for region in self.regions.values_mut() {
            if let RegionMembers::Facets(facets) = &mut region.members {
                for f in facets.iter_mut() {
                    if repaired.binary_search(&f.element).is_ok() {
                        if f.local == k - 2 {
                            f.local = k - 1;
                        } else if f.local == k - 1 {
                            f.local = k - 2;
                        }
                    }
                }
                facets.sort_unstable();
            }
        }
        repaired
    }
}
