//! Native JSON mesh format.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{FacetRef, Mesh, MeshError, RegionMembers, RegionTag};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshDocument {
    dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    thickness: Option<f64>,
    nodes: Vec<[f64; 3]>,
    elements: Vec<Vec<usize>>,
    #[serde(default)]
    regions: BTreeMap<String, RegionDocument>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionDocument {
    kind: RegionKind,
    members: Vec<Member>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RegionKind {
    Nodes,
    Facets,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum Member {
    Node(usize),
    Facet([usize; 2]),
}

/// Parses a native JSON mesh document, repairs element orientation and
/// validates the result.
pub fn load_mesh<R: Read>(source: R) -> Result<Mesh, MeshError> {
    let doc: MeshDocument = serde_json::from_reader(source).map_err(|e| MeshError::Parse(e.to_string()))?;
    let dim = doc.dimension;
    if dim != 2 && dim != 3 {
        return Err(MeshError::Parse(format!("dimension must be 2 or 3, got {dim}")));
    }
    let thickness = match (dim, doc.thickness) {
        (2, Some(t)) => t,
        (2, None) => return Err(MeshError::Parse("`thickness` is required for dimension 2".into())),
        (_, Some(_)) => return Err(MeshError::Parse("`thickness` is only allowed for dimension 2".into())),
        (_, None) => 1.0,
    };
    let mut connectivity = Vec::with_capacity(doc.elements.len() * (dim + 1));
    for (e, el) in doc.elements.iter().enumerate() {
        if el.len() != dim + 1 {
            return Err(MeshError::Invalid(vec![format!(
                "element {e} has {} nodes, expected {}",
                el.len(),
                dim + 1
            )]));
        }
        connectivity.extend_from_slice(el);
    }
    let mut regions = Vec::with_capacity(doc.regions.len());
    for (name, region) in doc.regions {
        let tag = match region.kind {
            RegionKind::Nodes => {
                let nodes = region
                    .members
                    .iter()
                    .map(|m| match m {
                        Member::Node(n) => Ok(*n),
                        Member::Facet(_) => Err(MeshError::Parse(format!("region `{name}`: node member expected"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                RegionTag::nodes(name, nodes)
            }
            RegionKind::Facets => {
                let facets = region
                    .members
                    .iter()
                    .map(|m| match m {
                        Member::Facet([element, local]) => Ok(FacetRef {
                            element: *element,
                            local: *local,
                        }),
                        Member::Node(_) => Err(MeshError::Parse(format!(
                            "region `{name}`: [element, local_facet] member expected"
                        ))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                RegionTag::facets(name, facets)
            }
        };
        regions.push(tag);
    }
    let mut mesh = Mesh::from_raw(dim, thickness, doc.nodes, connectivity, regions);
    let n = mesh.node_count();
    if mesh.connectivity().iter().all(|&i| i < n) {
        let repaired = mesh.repair_orientation();
        if !repaired.is_empty() {
            log::warn!("repaired orientation of {} element(s): {:?}", repaired.len(), repaired);
        }
    }
    let report = super::validate(&mesh);
    if !report.is_valid {
        return Err(MeshError::Invalid(report.messages));
    }
    Ok(mesh)
}

/// Serializes a mesh to the native JSON format. Coordinates round-trip
/// bit-exactly.
pub fn save_mesh(mesh: &Mesh) -> String {
    let regions = mesh
        .regions()
        .map(|r| {
            let doc = match &r.members {
                RegionMembers::Nodes(n) => RegionDocument {
                    kind: RegionKind::Nodes,
                    members: n.iter().map(|&i| Member::Node(i)).collect(),
                },
                RegionMembers::Facets(f) => RegionDocument {
                    kind: RegionKind::Facets,
                    members: f.iter().map(|f| Member::Facet([f.element, f.local])).collect(),
                },
            };
            (r.name.clone(), doc)
        })
        .collect();
    let doc = MeshDocument {
        dimension: mesh.dimension(),
        thickness: (mesh.dimension() == 2).then(|| mesh.thickness()),
        nodes: mesh.nodes().to_vec(),
        elements: mesh.elements().map(|e| e.to_vec()).collect(),
        regions,
    };
    serde_json::to_string(&doc).expect("mesh document serializes")
}
