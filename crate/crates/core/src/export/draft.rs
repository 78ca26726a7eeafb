use serde::{Deserialize, Serialize};

use super::{ExportError, SurfaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DraftViolation {
    pub triangle: usize,
    /// degrees
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DraftReport {
    pub pull_direction: [f64; 3],
    /// degrees
    pub min_angle: f64,
    pub violations: Vec<DraftViolation>,
}

/// Flags faces whose draft against `pull` is below `min_angle` degrees.
///
/// Draft is `asin(|n · pull|)`: 0° for walls parallel to the pull, 90° for
/// faces across it. Faces on either side of the parting plane are treated
/// alike.
pub fn draft_check(surface: &SurfaceModel, pull: [f64; 3], min_angle: f64) -> Result<DraftReport, ExportError> {
    let len = pull.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !((len - 1.0).abs() <= 1e-9) {
        return Err(ExportError::InvalidPull(pull));
    }
    if !(0.0..90.0).contains(&min_angle) {
        return Err(ExportError::InvalidAngle(min_angle));
    }
    let violations = surface
        .triangles
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let d: f64 = t.normal.iter().zip(&pull).map(|(n, p)| n * p).sum();
            let angle = d.abs().min(1.0).asin().to_degrees();
            (angle < min_angle).then_some(DraftViolation { triangle: i, angle })
        })
        .collect();
    Ok(DraftReport {
        pull_direction: pull,
        min_angle,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::export::surface_mesh;
    use crate::mesh::fixtures::unit_cube;

    #[test]
    fn cube_side_walls_violate() {
        let s = surface_mesh(&unit_cube()).unwrap();
        let r = draft_check(&s, [0.0, 0.0, 1.0], 2.0).unwrap();
        assert_eq!(r.violations.len(), 8);
        for v in &r.violations {
            assert_eq!(s.triangles[v.triangle].normal[2], 0.0);
            assert_eq!(v.angle, 0.0);
        }
    }

    #[test]
    fn zero_minimum_never_violates() {
        let s = surface_mesh(&unit_cube()).unwrap();
        assert!(draft_check(&s, [0.0, 0.0, 1.0], 0.0).unwrap().violations.is_empty());
    }

    #[test]
    fn invalid_arguments() {
        let s = surface_mesh(&unit_cube()).unwrap();
        assert!(matches!(draft_check(&s, [0.0, 0.0, 2.0], 2.0), Err(ExportError::InvalidPull(_))));
        assert!(matches!(draft_check(&s, [0.0, 0.0, 1.0], 90.0), Err(ExportError::InvalidAngle(_))));
        assert!(draft_check(&s, [0.0, 0.0, 1.0], -1.0).is_err());
    }
}
