use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::mesh::Mesh;

/// Backtracking controls for a shape update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepControl {
    /// Largest nodal move of the first trial, in units of the shortest edge.
    pub move_cap: f64,
    pub quality_floor: f64,
    pub max_halvings: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            move_cap: 0.2,
            quality_floor: 0.05,
            max_halvings: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome<T> {
    /// The candidate mesh if accepted, otherwise the input mesh.
    pub mesh: Mesh,
    pub accepted: bool,
    /// Largest nodal move over the shortest edge; 0 when rejected.
    pub step_size: f64,
    pub min_quality: f64,
    pub halvings: usize,
    /// Whatever the merit callback returned for the accepted candidate.
    pub evaluation: Option<T>,
}

fn min_quality(mesh: &Mesh) -> f64 {
    (0..mesh.element_count()).map(|e| mesh.element_quality(e)).fold(f64::INFINITY, f64::min)
}

/// `x + t V`, leaving coordinates with zero velocity bitwise unchanged.
fn moved(mesh: &Mesh, velocity: &[Vector3<f64>], t: f64) -> Mesh {
    let nodes = mesh
        .nodes()
        .iter()
        .zip(velocity)
        .map(|(p, v)| {
            let mut q = *p;
            for c in 0..3 {
                if v[c] != 0.0 {
                    q[c] += t * v[c];
                }
            }
            q
        })
        .collect();
    mesh.with_nodes(nodes)
}

/// Geometric step: the largest trial (halving from the move cap) that keeps
/// every element positive with quality above the floor.
pub fn step(mesh: &Mesh, velocity: &[Vector3<f64>], control: &StepControl) -> StepOutcome<()> {
    step_with_merit(mesh, velocity, control, f64::INFINITY, |_| Some((0.0, ())))
}

/// Backtracking step that additionally requires `merit(candidate)` to fall
/// strictly below `current`. The callback returns `None` when the candidate
/// cannot be evaluated, which counts as a failed trial.
pub fn step_with_merit<T>(
    mesh: &Mesh,
    velocity: &[Vector3<f64>],
    control: &StepControl,
    current: f64,
    mut merit: impl FnMut(&Mesh) -> Option<(f64, T)>,
) -> StepOutcome<T> {
    let vmax = velocity.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let rejected = |halvings| StepOutcome {
        mesh: mesh.clone(),
        accepted: false,
        step_size: 0.0,
        min_quality: min_quality(mesh),
        halvings,
        evaluation: None,
    };
    if vmax == 0.0 {
        return StepOutcome { accepted: true, ..rejected(0) };
    }
    if !vmax.is_finite() {
        return rejected(0);
    }
    let h = mesh.min_edge_length();
    let mut t = control.move_cap * h / vmax;
    for halvings in 0..=control.max_halvings {
        let candidate = moved(mesh, velocity, t);
        let positive = (0..candidate.element_count()).all(|e| candidate.element_measure(e) > 0.0);
        let quality = min_quality(&candidate);
        if positive && quality >= control.quality_floor {
            if let Some((value, eval)) = merit(&candidate) {
                if value < current {
                    return StepOutcome {
                        mesh: candidate,
                        accepted: true,
                        step_size: t * vmax / h,
                        min_quality: quality,
                        halvings,
                        evaluation: Some(eval),
                    };
                }
            }
        }
        t *= 0.5;
    }
    rejected(control.max_halvings)
}
