use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ExportError, SurfaceModel};

/// First bytes of every binary header; the rest is padded with spaces.
pub const STL_HEADER_TAG: &str = "tracshape";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StlFormat {
    #[default]
    Binary,
    Ascii,
}

/// Serializes the surface with coordinates multiplied by its scale.
///
/// Binary: 80-byte header, `u32` count, then per triangle 12 `f32` (normal,
/// three vertices) and a zero `u16`, all little-endian. ASCII: 9 significant
/// digits per value.
pub fn write_stl(surface: &SurfaceModel, format: StlFormat) -> Result<Vec<u8>, ExportError> {
    let scale = surface.scale;
    match format {
        StlFormat::Binary => {
            let count = u32::try_from(surface.len()).map_err(|_| ExportError::TooManyTriangles(surface.len()))?;
            let mut out = Vec::with_capacity(84 + 50 * surface.len());
            let mut header = [b' '; 80];
            header[..STL_HEADER_TAG.len()].copy_from_slice(STL_HEADER_TAG.as_bytes());
            out.extend_from_slice(&header);
            out.extend_from_slice(&count.to_le_bytes());
            for t in &surface.triangles {
                for c in t.normal {
                    out.extend_from_slice(&(c as f32).to_le_bytes());
                }
                for v in &t.vertices {
                    for c in v {
                        out.extend_from_slice(&((c * scale) as f32).to_le_bytes());
                    }
                }
                out.extend_from_slice(&0u16.to_le_bytes());
            }
            Ok(out)
        }
        StlFormat::Ascii => {
            let mut s = String::new();
            let _ = writeln!(s, "solid {STL_HEADER_TAG}");
            for t in &surface.triangles {
                let [nx, ny, nz] = t.normal;
                let _ = writeln!(s, "  facet normal {nx:.8e} {ny:.8e} {nz:.8e}");
                s.push_str("    outer loop\n");
                for v in &t.vertices {
                    let _ = writeln!(s, "      vertex {:.8e} {:.8e} {:.8e}", v[0] * scale, v[1] * scale, v[2] * scale);
                }
                s.push_str("    endloop\n  endfacet\n");
            }
            let _ = writeln!(s, "endsolid {STL_HEADER_TAG}");
            Ok(s.into_bytes())
        }
    }
}
