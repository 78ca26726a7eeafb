//! Browser bindings: solve a planar fixture, step a shape optimization and
//! export the lug as binary STL.

use serde_json::{json, Value};
use tracshape::export::{surface_mesh, write_stl, StlFormat};
use tracshape::fem::{solve_static, LoadCase, Material, Solution, SolverOptions};
use tracshape::mesh::fixtures::FixtureParams;
use tracshape::mesh::{make_fixture, Mesh};
use tracshape::shape::{Mode, OptimizationProblem, Optimizer};
use wasm_bindgen::prelude::*;

const PLANAR: [&str; 3] = ["cantilever2d", "plate_with_hole2d", "ring2d"];

fn planar(name: &str) -> Result<Mesh, String> {
    if !PLANAR.contains(&name) {
        return Err(format!("`{name}` is not a planar fixture (expected one of {})", PLANAR.join(", ")));
    }
    make_fixture(name, &FixtureParams::new()).map_err(|e| e.to_string())
}

fn loads(fx: f64, fy: f64) -> LoadCase {
    LoadCase::pinned_with_force("pin", "load", [fx, fy, 0.0])
}

/// Node coordinates, triangles and per-element von Mises stress.
fn frame(mesh: &Mesh, solution: &Solution) -> Value {
    json!({
        "nodes": mesh.nodes().iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>(),
        "triangles": mesh.elements().collect::<Vec<_>>(),
        "von_mises": solution.von_mises,
        "displacement": solution.displacement.iter().map(|u| [u[0], u[1]]).collect::<Vec<_>>(),
        "compliance": solution.compliance,
        "max_vm": solution.max_von_mises(),
        "volume": mesh.volume(),
    })
}

pub fn solve_frame(fixture: &str, fx: f64, fy: f64) -> Result<String, String> {
    let mesh = planar(fixture)?;
    let solution = solve_static(&mesh, &Material::default(), &loads(fx, fy), &SolverOptions::default()).map_err(|e| e.to_string())?;
    Ok(frame(&mesh, &solution).to_string())
}

pub fn lug_stl_bytes(n: u32) -> Result<Vec<u8>, String> {
    let params: FixtureParams = [("n".to_string(), f64::from(n))].into_iter().collect();
    let mesh = make_fixture("lug3d", &params).map_err(|e| e.to_string())?;
    let surface = surface_mesh(&mesh).map_err(|e| e.to_string())?;
    write_stl(&surface, StlFormat::Binary).map_err(|e| e.to_string())
}

/// Static analysis of a planar fixture pinned on `pin` with a resultant
/// force (N) on `load`. Returns the frame as JSON.
#[wasm_bindgen]
pub fn solve(fixture: &str, fx: f64, fy: f64) -> Result<String, JsError> {
    solve_frame(fixture, fx, fy).map_err(|e| JsError::new(&e))
}

/// Binary STL of the lug fixture with `n` cells across its width.
#[wasm_bindgen]
pub fn lug_stl(n: u32) -> Result<Vec<u8>, JsError> {
    lug_stl_bytes(n).map_err(|e| JsError::new(&e))
}

/// An optimization run advanced one iteration at a time.
#[wasm_bindgen]
pub struct Session {
    optimizer: Optimizer,
}

impl Session {
    pub fn create(fixture: &str, stress_constrained: bool, fx: f64, fy: f64) -> Result<Session, String> {
        let mode = if stress_constrained {
            Mode::VolumeMinStressConstrained
        } else {
            Mode::ComplianceMinVolumeConstrained
        };
        let mut problem = OptimizationProblem::new(mode);
        problem.max_steps = usize::MAX;
        let optimizer = Optimizer::new(planar(fixture)?, Material::default(), loads(fx, fy), problem, SolverOptions::default())
            .map_err(|e| e.to_string())?;
        Ok(Session { optimizer })
    }

    pub fn advance(&mut self) -> Result<String, String> {
        let record = self.optimizer.step().map_err(|e| e.to_string())?;
        let mut out = frame(self.optimizer.mesh(), self.optimizer.solution());
        out["record"] = serde_json::to_value(record).expect("records serialize");
        out["stalled"] = json!(self.optimizer.stop_reason().is_some());
        Ok(out.to_string())
    }
}

#[wasm_bindgen]
impl Session {
    #[wasm_bindgen(constructor)]
    pub fn new(fixture: &str, stress_constrained: bool, fx: f64, fy: f64) -> Result<Session, JsError> {
        Session::create(fixture, stress_constrained, fx, fy).map_err(|e| JsError::new(&e))
    }

    /// Runs one iteration and returns the new frame with its history record.
    pub fn step(&mut self) -> Result<String, JsError> {
        self.advance().map_err(|e| JsError::new(&e))
    }

    pub fn iterations(&self) -> usize {
        self.optimizer.history().len()
    }

    pub fn initial_volume(&self) -> f64 {
        self.optimizer.initial_volume()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_returns_a_drawable_frame() {
        let v: Value = serde_json::from_str(&solve_frame("plate_with_hole2d", 2e4, 0.0).unwrap()).unwrap();
        let nodes = v["nodes"].as_array().unwrap().len();
        let tris = v["triangles"].as_array().unwrap();
        assert_eq!(tris.len(), v["von_mises"].as_array().unwrap().len());
        assert!(tris.iter().flat_map(|t| t.as_array().unwrap()).all(|i| (i.as_u64().unwrap() as usize) < nodes));
        assert!(v["max_vm"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn three_dimensional_fixtures_are_rejected() {
        assert!(solve_frame("lug3d", 1.0, 0.0).is_err());
        assert!(Session::create("bar3d", true, 1.0, 0.0).is_err());
    }

    #[test]
    fn session_steps_reduce_compliance() {
        let mut s = Session::create("plate_with_hole2d", false, 2e4, 0.0).unwrap();
        let first: Value = serde_json::from_str(&s.advance().unwrap()).unwrap();
        for _ in 0..4 {
            s.advance().unwrap();
        }
        let last: Value = serde_json::from_str(&s.advance().unwrap()).unwrap();
        assert_eq!(last["record"]["iteration"], 6);
        assert!(last["compliance"].as_f64().unwrap() < first["compliance"].as_f64().unwrap());
    }

    #[test]
    fn stl_has_binary_layout() {
        let bytes = lug_stl_bytes(4).unwrap();
        let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
        assert_eq!(bytes.len(), 84 + 50 * count);
    }
}
