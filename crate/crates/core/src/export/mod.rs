//! Surface extraction, STL output, watertightness and draft-angle checks for
//! rapid prototyping of 3D meshes.

mod draft;
mod manifold;
mod stl;
mod surface;

use thiserror::Error;

use crate::mesh::MeshError;

pub use draft::{draft_check, DraftReport, DraftViolation};
pub use manifold::{check_manifold, EdgeDefect, ManifoldReport, WELD_TOLERANCE};
pub use stl::{write_stl, StlFormat, STL_HEADER_TAG};
pub use surface::{surface_mesh, SurfaceModel, SurfaceTriangle, DEFAULT_EXPORT_SCALE};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("only 3D meshes can be exported, got a {0}D mesh")]
    NotThreeDimensional(usize),
    #[error("degenerate boundary triangle {0}")]
    DegenerateTriangle(usize),
    #[error("{0} triangles exceed the binary STL limit")]
    TooManyTriangles(usize),
    #[error("pull direction must be a unit vector, got {0:?}")]
    InvalidPull([f64; 3]),
    #[error("minimum draft angle must lie in [0, 90) degrees, got {0}")]
    InvalidAngle(f64),
    #[error("invalid export scale {0}")]
    InvalidScale(f64),
}
