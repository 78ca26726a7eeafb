use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::gradient::{aggregate_gradient_with, compliance_gradient_with, restrict, volume_gradient, NodeField};
use super::smoothing::{traction_smooth, SMOOTHING_POISSON_RATIO};
use super::step::{step_with_merit, StepControl};
use super::ShapeError;
use crate::fem::{
    element_volumes, stress_aggregate, LoadCase, Material, Response, Solution, SolverOptions, StaticSystem,
    DEFAULT_AGGREGATION_EXPONENT,
};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Minimize volume subject to `Θ ≤ stress_limit`.
    #[serde(rename = "volume-min-stress-constrained")]
    VolumeMinStressConstrained,
    /// Minimize compliance subject to `V ≤ volume_limit`.
    #[serde(rename = "compliance-min-volume-constrained")]
    ComplianceMinVolumeConstrained,
}

fn default_design() -> String {
    "design".into()
}

fn default_frozen() -> Vec<String> {
    vec!["frozen".into()]
}

fn default_exponent() -> f64 {
    DEFAULT_AGGREGATION_EXPONENT
}

fn default_penalty() -> f64 {
    10.0
}

fn default_max_steps() -> usize {
    30
}

/// `minimize f(x) subject to g(x) ≤ 0` over node positions, with design and
/// frozen node sets given by region names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizationProblem {
    pub mode: Mode,
    #[serde(default = "default_design")]
    pub design_region: String,
    #[serde(default = "default_frozen")]
    pub frozen_regions: Vec<String>,
    /// Bound on Θ (mode 1). Defaults to the initial Θ.
    #[serde(default)]
    pub stress_limit: Option<f64>,
    /// m³ (mode 2). Defaults to the initial volume.
    #[serde(default)]
    pub volume_limit: Option<f64>,
    #[serde(default = "default_exponent")]
    pub aggregation_exponent: f64,
    /// Pa. Defaults to the material's allowed stress.
    #[serde(default)]
    pub sigma_ref: Option<f64>,
    #[serde(default)]
    pub lagrange_multiplier: f64,
    #[serde(default = "default_penalty")]
    pub penalty: f64,
    /// Stop once the volume has dropped by this fraction.
    #[serde(default)]
    pub volume_reduction_cap: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub step: StepControl,
}

impl OptimizationProblem {
    pub fn new(mode: Mode) -> Self {
        OptimizationProblem {
            mode,
            design_region: default_design(),
            frozen_regions: default_frozen(),
            stress_limit: None,
            volume_limit: None,
            aggregation_exponent: DEFAULT_AGGREGATION_EXPONENT,
            sigma_ref: None,
            lagrange_multiplier: 0.0,
            penalty: default_penalty(),
            volume_reduction_cap: None,
            max_steps: default_max_steps(),
            step: StepControl::default(),
        }
    }

    fn check(&self) -> Result<(), ShapeError> {
        let bad = |msg: String| Err(ShapeError::Problem(msg));
        match self.mode {
            Mode::VolumeMinStressConstrained if self.volume_limit.is_some() => {
                return bad("volume_limit is not used by the stress-constrained mode".into())
            }
            Mode::ComplianceMinVolumeConstrained if self.stress_limit.is_some() => {
                return bad("stress_limit is not used by the volume-constrained mode".into())
            }
            _ => {}
        }
        if let Some(l) = self.stress_limit.or(self.volume_limit) {
            if !(l > 0.0) || !l.is_finite() {
                return bad(format!("limit must be positive, got {l}"));
            }
        }
        if !(self.lagrange_multiplier >= 0.0) {
            return bad(format!("lagrange multiplier must be non-negative, got {}", self.lagrange_multiplier));
        }
        if !(self.penalty > 0.0) {
            return bad(format!("penalty must be positive, got {}", self.penalty));
        }
        if let Some(cap) = self.volume_reduction_cap {
            if !(0.0..1.0).contains(&cap) {
                return bad(format!("volume_reduction_cap must lie in [0, 1), got {cap}"));
            }
        }
        if !(self.aggregation_exponent >= 2.0) {
            return bad(format!("aggregation exponent must be at least 2, got {}", self.aggregation_exponent));
        }
        let s = &self.step;
        if !(s.move_cap > 0.0) || !(0.0..1.0).contains(&s.quality_floor) {
            return bad(format!("invalid step control {s:?}"));
        }
        Ok(())
    }
}

/// One optimization iteration, recorded after its step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub iteration: usize,
    /// m³
    pub volume: f64,
    /// J
    pub compliance: f64,
    /// Pa
    pub max_vm: f64,
    pub aggregate: f64,
    pub step_size: f64,
    /// `max(0, g)` after the step.
    pub constraint_violation: f64,
    pub min_quality: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxSteps,
    VolumeCap,
    /// Three consecutive rejected steps.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub mesh: Mesh,
    /// Static solution on the final mesh.
    pub solution: Solution,
    pub response: Response,
    pub history: Vec<HistoryRecord>,
    pub stop: StopReason,
    pub lagrange_multiplier: f64,
    pub penalty: f64,
}

/// Solved state of one design.
struct State {
    system: StaticSystem,
    u: Vec<f64>,
    solution: Solution,
    response: Response,
    volume: f64,
}

impl State {
    fn new(mesh: &Mesh, material: &Material, loads: &LoadCase, solver: &SolverOptions, p: f64, sigma_ref: f64) -> Result<Self, ShapeError> {
        let system = StaticSystem::new(mesh, material, loads, solver)?;
        let u = system.solve_state(mesh, material)?;
        let solution = system.solution(mesh, material, &u)?;
        let aggregate = stress_aggregate(&element_volumes(mesh), &solution.von_mises, p, sigma_ref)?;
        let response = Response {
            compliance: solution.compliance,
            max_vm: solution.max_von_mises(),
            aggregate,
        };
        Ok(State {
            system,
            u,
            solution,
            response,
            volume: mesh.volume(),
        })
    }
}

const MAX_PENALTY: f64 = 1e6;
const STALL_LIMIT: usize = 3;

/// Steppable augmented-Lagrangian optimizer (PHR form).
///
/// With `v = max(g, −λ/μ)` the merit is `f + λv + μv²/2` and its gradient
/// `∇f + max(0, λ + μg) ∇g`. Mode 1 uses `f = V/V₀`, `g = Θ/Θ_lim − 1`;
/// mode 2 uses `f = C/C₀`, `g = V/V_lim − 1`.
pub struct Optimizer {
    mesh: Mesh,
    material: Material,
    loads: LoadCase,
    problem: OptimizationProblem,
    solver: SolverOptions,
    design: Vec<usize>,
    frozen: Vec<usize>,
    sigma_ref: f64,
    limit: f64,
    initial_volume: f64,
    objective_scale: f64,
    lambda: f64,
    mu: f64,
    state: State,
    history: Vec<HistoryRecord>,
    rejections: usize,
    violated_streak: usize,
    stop: Option<StopReason>,
}

impl Optimizer {
    pub fn new(
        mesh: Mesh,
        material: Material,
        loads: LoadCase,
        problem: OptimizationProblem,
        solver: SolverOptions,
    ) -> Result<Self, ShapeError> {
        problem.check()?;
        material.validate()?;
        let design = mesh.region_nodes(&problem.design_region)?;
        let mut frozen = Vec::new();
        for name in &problem.frozen_regions {
            frozen.extend(mesh.region_nodes(name)?);
        }
        frozen.sort_unstable();
        frozen.dedup();
        if let Some(n) = design.iter().find(|n| frozen.binary_search(n).is_ok()) {
            return Err(ShapeError::Problem(format!("node {n} is both design and frozen")));
        }
        let sigma_ref = problem.sigma_ref.unwrap_or(material.allowed_stress);
        let p = problem.aggregation_exponent;
        let state = State::new(&mesh, &material, &loads, &solver, p, sigma_ref)?;
        let (limit, objective_scale) = match problem.mode {
            Mode::VolumeMinStressConstrained => (problem.stress_limit.unwrap_or(state.response.aggregate), state.volume),
            Mode::ComplianceMinVolumeConstrained => (problem.volume_limit.unwrap_or(state.volume), state.response.compliance),
        };
        if !(limit > 0.0) {
            return Err(ShapeError::Problem(format!("constraint limit must be positive, got {limit}")));
        }
        if !(objective_scale > 0.0) {
            return Err(ShapeError::Problem("initial objective is zero; nothing to optimize".into()));
        }
        let stop = (problem.max_steps == 0).then_some(StopReason::MaxSteps);
        Ok(Optimizer {
            initial_volume: state.volume,
            lambda: problem.lagrange_multiplier,
            mu: problem.penalty,
            mesh,
            material,
            loads,
            problem,
            solver,
            design,
            frozen,
            sigma_ref,
            limit,
            objective_scale,
            state,
            history: Vec::new(),
            rejections: 0,
            violated_streak: 0,
            stop,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn solution(&self) -> &Solution {
        &self.state.solution
    }

    pub fn response(&self) -> &Response {
        &self.state.response
    }

    pub fn history(&self) -> &[HistoryRecord] {
        &self.history
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.stop
    }

    pub fn initial_volume(&self) -> f64 {
        self.initial_volume
    }

    /// Resolved constraint limit (Θ bound or volume bound).
    pub fn limit(&self) -> f64 {
        self.limit
    }

    pub fn multipliers(&self) -> (f64, f64) {
        (self.lambda, self.mu)
    }

    pub fn frozen_nodes(&self) -> &[usize] {
        &self.frozen
    }

    /// Normalized objective `f` of the current design.
    pub fn objective_value(&self) -> f64 {
        self.objective(&self.state)
    }

    /// Normalized constraint `g` of the current design (feasible when ≤ 0).
    pub fn constraint_value(&self) -> f64 {
        self.constraint(&self.state)
    }

    fn objective(&self, s: &State) -> f64 {
        match self.problem.mode {
            Mode::VolumeMinStressConstrained => s.volume / self.objective_scale,
            Mode::ComplianceMinVolumeConstrained => s.response.compliance / self.objective_scale,
        }
    }

    fn constraint(&self, s: &State) -> f64 {
        match self.problem.mode {
            Mode::VolumeMinStressConstrained => s.response.aggregate / self.limit - 1.0,
            Mode::ComplianceMinVolumeConstrained => s.volume / self.limit - 1.0,
        }
    }

    fn merit(&self, s: &State) -> f64 {
        let g = self.constraint(s);
        let v = g.max(-self.lambda / self.mu);
        self.objective(s) + self.lambda * v + 0.5 * self.mu * v * v
    }

    fn merit_gradient(&self) -> Result<NodeField, ShapeError> {
        let s = &self.state;
        let g = self.constraint(s);
        let weight = (self.lambda + self.mu * g).max(0.0);
        let volume = volume_gradient(&self.mesh, None);
        let (df, dg, df_scale, dg_scale) = match self.problem.mode {
            Mode::VolumeMinStressConstrained => {
                let dg = if weight > 0.0 {
                    aggregate_gradient_with(
                        &s.system,
                        &self.mesh,
                        &self.material,
                        &self.loads,
                        &s.solution,
                        self.problem.aggregation_exponent,
                        self.sigma_ref,
                    )?
                } else {
                    vec![Vector3::zeros(); self.mesh.node_count()]
                };
                (volume, dg, 1.0 / self.objective_scale, 1.0 / self.limit)
            }
            Mode::ComplianceMinVolumeConstrained => {
                let df = compliance_gradient_with(&s.system, &self.mesh, &self.material, &self.loads, &s.u)?;
                (df, volume, 1.0 / self.objective_scale, 1.0 / self.limit)
            }
        };
        let mut out: NodeField = df
            .iter()
            .zip(&dg)
            .map(|(a, b)| df_scale * a + weight * dg_scale * b)
            .collect();
        restrict(&mut out, &self.design);
        Ok(out)
    }

    fn update_multipliers(&mut self) {
        let g = self.constraint(&self.state);
        self.lambda = (self.lambda + self.mu * g).max(0.0);
        if g > 0.01 {
            self.violated_streak += 1;
            if self.violated_streak >= 2 {
                self.mu = (2.0 * self.mu).min(MAX_PENALTY);
            }
        } else {
            self.violated_streak = 0;
        }
    }

    /// Runs one iteration. Returns `None` once a stop criterion has fired.
    pub fn step(&mut self) -> Result<Option<HistoryRecord>, ShapeError> {
        if self.stop.is_some() {
            return Ok(None);
        }
        let raw = self.merit_gradient()?;
        let velocity = traction_smooth(&self.mesh, &raw, &self.frozen, SMOOTHING_POISSON_RATIO)?;
        let current = self.merit(&self.state);
        let p = self.problem.aggregation_exponent;
        let outcome = step_with_merit(&self.mesh, &velocity, &self.problem.step, current, |candidate| {
            let state = State::new(candidate, &self.material, &self.loads, &self.solver, p, self.sigma_ref).ok()?;
            Some((self.merit(&state), state))
        });
        let moved = outcome.accepted && outcome.evaluation.is_some();
        if let Some(state) = outcome.evaluation {
            self.mesh = outcome.mesh;
            self.state = state;
        }
        if outcome.accepted {
            self.rejections = 0;
        } else {
            self.rejections += 1;
        }
        self.update_multipliers();
        let record = HistoryRecord {
            iteration: self.history.len() + 1,
            volume: self.state.volume,
            compliance: self.state.response.compliance,
            max_vm: self.state.response.max_vm,
            aggregate: self.state.response.aggregate,
            step_size: if moved { outcome.step_size } else { 0.0 },
            constraint_violation: self.constraint(&self.state).max(0.0),
            min_quality: outcome.min_quality,
            accepted: outcome.accepted,
        };
        self.history.push(record);
        log::debug!(
            "iteration {}: volume {:.6e} aggregate {:.6} merit {:.6e} lambda {:.3e} mu {:.1e} accepted {}",
            record.iteration,
            record.volume,
            record.aggregate,
            self.merit(&self.state),
            self.lambda,
            self.mu,
            record.accepted
        );
        let capped = self
            .problem
            .volume_reduction_cap
            .is_some_and(|cap| self.state.volume <= (1.0 - cap) * self.initial_volume);
        self.stop = if capped {
            Some(StopReason::VolumeCap)
        } else if self.rejections >= STALL_LIMIT {
            Some(StopReason::Stalled)
        } else if self.history.len() >= self.problem.max_steps {
            Some(StopReason::MaxSteps)
        } else {
            None
        };
        Ok(Some(record))
    }

    pub fn run(mut self) -> Result<OptimizationResult, ShapeError> {
        while self.step()?.is_some() {}
        Ok(OptimizationResult {
            stop: self.stop.unwrap_or(StopReason::MaxSteps),
            lagrange_multiplier: self.lambda,
            penalty: self.mu,
            mesh: self.mesh,
            solution: self.state.solution,
            response: self.state.response,
            history: self.history,
        })
    }
}

/// Runs the optimizer until a stop criterion fires.
pub fn optimize(
    mesh: &Mesh,
    material: &Material,
    loads: &LoadCase,
    problem: &OptimizationProblem,
    solver: &SolverOptions,
) -> Result<OptimizationResult, ShapeError> {
    Optimizer::new(mesh.clone(), *material, loads.clone(), problem.clone(), *solver)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_fixture;

    fn plate_loads() -> LoadCase {
        LoadCase::pinned_with_force("pin", "load", [2e4, 0.0, 0.0])
    }

    #[test]
    fn zero_steps_returns_input() {
        let mesh = make_fixture("plate_with_hole2d", &Default::default()).unwrap();
        let mut problem = OptimizationProblem::new(Mode::ComplianceMinVolumeConstrained);
        problem.max_steps = 0;
        let out = optimize(&mesh, &Material::default(), &plate_loads(), &problem, &SolverOptions::default()).unwrap();
        assert!(out.history.is_empty());
        assert_eq!(out.mesh, mesh);
        assert_eq!(out.stop, StopReason::MaxSteps);
    }

    #[test]
    fn problem_invariants_are_checked() {
        let mesh = make_fixture("plate_with_hole2d", &Default::default()).unwrap();
        let mut problem = OptimizationProblem::new(Mode::VolumeMinStressConstrained);
        problem.volume_limit = Some(1.0);
        let r = Optimizer::new(mesh.clone(), Material::default(), plate_loads(), problem, SolverOptions::default());
        assert!(matches!(r, Err(ShapeError::Problem(_))));
        let mut problem = OptimizationProblem::new(Mode::VolumeMinStressConstrained);
        problem.frozen_regions.push("design".into());
        let r = Optimizer::new(mesh, Material::default(), plate_loads(), problem, SolverOptions::default());
        assert!(matches!(r, Err(ShapeError::Problem(_))));
    }

    #[test]
    fn compliance_mode_descends_and_keeps_frozen_nodes() {
        let mesh = make_fixture("plate_with_hole2d", &Default::default()).unwrap();
        let mut problem = OptimizationProblem::new(Mode::ComplianceMinVolumeConstrained);
        problem.max_steps = 5;
        let mut opt = Optimizer::new(mesh.clone(), Material::default(), plate_loads(), problem, SolverOptions::default()).unwrap();
        while let Some(rec) = opt.step().unwrap() {
            assert!(rec.min_quality >= 0.05);
        }
        let frozen = mesh.region_nodes("frozen").unwrap();
        for n in frozen {
            assert_eq!(mesh.nodes()[n].map(f64::to_bits), opt.mesh().nodes()[n].map(f64::to_bits));
        }
        let h = opt.history();
        assert_eq!(h.len(), 5);
        assert!(h.windows(2).all(|w| w[1].iteration == w[0].iteration + 1));
        assert_eq!(h.last().unwrap().volume, opt.mesh().volume());
    }
}
