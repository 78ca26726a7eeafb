use nalgebra::{DMatrix, Matrix3, SymmetricEigen};

use super::assembly::assemble;
use super::exact;
use super::loads::{constrained_dofs, load_vector};
use super::solver::{attainable_scale, norm, LinearSolver, SolverOptions};
use super::sparse::CsrMatrix;
use super::stress::recover_stress;
use super::{FemError, LoadCase, Material};
use crate::mesh::Mesh;

/// Result of a linear static analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// m, per node
    pub displacement: Vec<[f64; 3]>,
    /// Pa, per element
    pub stress: Vec<Matrix3<f64>>,
    /// Pa, per element
    pub von_mises: Vec<f64>,
    /// J
    pub compliance: f64,
    /// N, summed over constrained dofs
    pub reaction: [f64; 3],
}

impl Solution {
    /// Flattened dof vector (`dim` components per node).
    pub fn dofs(&self, dim: usize) -> Vec<f64> {
        self.displacement.iter().flat_map(|d| d[..dim].to_vec()).collect()
    }

    pub fn max_von_mises(&self) -> f64 {
        self.von_mises.iter().copied().fold(0.0, f64::max)
    }
}

/// Assembled and factored reduced system, reusable for adjoint solves.
pub(crate) struct StaticSystem {
    dim: usize,
    k: CsrMatrix,
    f: Vec<f64>,
    prescribed: Vec<Option<f64>>,
    free: Vec<usize>,
    solver: LinearSolver,
    rtol: f64,
}

impl StaticSystem {
    pub(crate) fn new(mesh: &Mesh, material: &Material, loads: &LoadCase, opts: &SolverOptions) -> Result<Self, FemError> {
        if !(opts.rtol > 0.0) {
            return Err(FemError::InvalidArgument(format!("rtol must be positive, got {}", opts.rtol)));
        }
        let f = load_vector(mesh, loads)?;
        let prescribed = constrained_dofs(mesh, loads)?;
        check_rigid_modes(mesh, &prescribed)?;
        let k = assemble(mesh, material)?;
        let free: Vec<usize> = (0..prescribed.len()).filter(|&i| prescribed[i].is_none()).collect();
        let solver = LinearSolver::new(k.submatrix(&free), opts)?;
        Ok(StaticSystem {
            dim: mesh.dimension(),
            k,
            f,
            prescribed,
            free,
            solver,
            rtol: opts.rtol,
        })
    }

    pub(crate) fn load(&self) -> &[f64] {
        &self.f
    }

    pub(crate) fn has_prescribed_motion(&self) -> bool {
        self.prescribed.iter().any(|p| matches!(p, Some(v) if *v != 0.0))
    }

    /// Displacement vector: prescribed values on constrained dofs, reduced
    /// solve on the rest, refined against the double-double operator.
    pub(crate) fn solve_state(&self, mesh: &Mesh, material: &Material) -> Result<Vec<f64>, FemError> {
        let mut u: Vec<f64> = self.prescribed.iter().map(|p| p.unwrap_or(0.0)).collect();
        let ku = self.k.mul_vec(&u);
        let rhs: Vec<f64> = self.free.iter().map(|&i| self.f[i] - ku[i]).collect();
        let x = self.solver.solve(&rhs, self.rtol)?;
        for (&i, xi) in self.free.iter().zip(x) {
            u[i] = xi;
        }
        let mut last = f64::INFINITY;
        for _ in 0..4 {
            let r = exact::residual(mesh, material, &self.f, &u)?;
            let rf: Vec<f64> = self.free.iter().map(|&i| r[i]).collect();
            let dx = self.solver.solve(&rf, self.rtol)?;
            let step = norm(&dx);
            for (&i, di) in self.free.iter().zip(&dx) {
                u[i] += di;
            }
            if step <= 4.0 * f64::EPSILON * norm(&u) || step >= 0.5 * last {
                break;
            }
            last = step;
        }
        Ok(u)
    }

    /// Solves `K_FF w_F = rhs_F` with `w = 0` on constrained dofs.
    pub(crate) fn solve_homogeneous(&self, rhs: &[f64]) -> Result<Vec<f64>, FemError> {
        let b: Vec<f64> = self.free.iter().map(|&i| rhs[i]).collect();
        let x = self.solver.solve(&b, self.rtol)?;
        let mut w = vec![0.0; self.prescribed.len()];
        for (&i, xi) in self.free.iter().zip(x) {
            w[i] = xi;
        }
        Ok(w)
    }

    pub(crate) fn solution(&self, mesh: &Mesh, material: &Material, u: &[f64]) -> Result<Solution, FemError> {
        let dim = self.dim;
        let ku = self.k.mul_vec(u);
        let free_res: Vec<f64> = self.free.iter().map(|&i| ku[i] - self.f[i]).collect();
        let fnorm = norm(&self.free.iter().map(|&i| self.f[i]).collect::<Vec<_>>());
        let scale = attainable_scale(&self.k, u, fnorm);
        let res = norm(&free_res);
        if res > 10.0 * self.rtol * scale {
            return Err(FemError::NonConvergence {
                iterations: 0,
                residual: res / scale,
            });
        }
        let mut reaction = [0.0; 3];
        for (i, p) in self.prescribed.iter().enumerate() {
            if p.is_some() {
                reaction[i % dim] += ku[i] - self.f[i];
            }
        }
        let displacement: Vec<[f64; 3]> = (0..mesh.node_count())
            .map(|n| {
                let mut d = [0.0; 3];
                d[..dim].copy_from_slice(&u[dim * n..dim * n + dim]);
                d
            })
            .collect();
        if displacement.iter().flatten().any(|v| !v.is_finite()) {
            return Err(FemError::Singular("non-finite displacement".into()));
        }
        let field = recover_stress(mesh, material, &displacement)?;
        let compliance = self.f.iter().zip(u).map(|(f, u)| f * u).sum();
        Ok(Solution {
            displacement,
            stress: field.stress,
            von_mises: field.von_mises,
            compliance,
            reaction,
        })
    }
}

/// Linear static analysis with Dirichlet dofs eliminated.
pub fn solve_static(mesh: &Mesh, material: &Material, loads: &LoadCase, opts: &SolverOptions) -> Result<Solution, FemError> {
    let system = StaticSystem::new(mesh, material, loads, opts)?;
    let u = system.solve_state(mesh, material)?;
    system.solution(mesh, material, &u)
}

/// Rejects constraint sets that leave a rigid-body mode free, naming the
/// dominant component of each free mode.
pub(crate) fn check_rigid_modes(mesh: &Mesh, prescribed: &[Option<f64>]) -> Result<(), FemError> {
    let dim = mesh.dimension();
    let nodes = mesh.nodes();
    let count = nodes.len().max(1) as f64;
    let mut center = [0.0; 3];
    for p in nodes {
        for c in 0..3 {
            center[c] += p[c] / count;
        }
    }
    let scale = nodes
        .iter()
        .map(|p| (0..3).map(|c| (p[c] - center[c]).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let (names, nmodes): (&[&str], usize) = if dim == 3 {
        (
            &["translation x", "translation y", "translation z", "rotation about x", "rotation about y", "rotation about z"],
            6,
        )
    } else {
        (&["translation x", "translation y", "rotation about z"], 3)
    };
    let rows: Vec<usize> = (0..prescribed.len()).filter(|&i| prescribed[i].is_some()).collect();
    let mut r = DMatrix::<f64>::zeros(rows.len(), nmodes);
    for (row, &dof) in rows.iter().enumerate() {
        let (n, c) = (dof / dim, dof % dim);
        let x: Vec<f64> = (0..3).map(|k| (nodes[n][k] - center[k]) / scale).collect();
        r[(row, c)] = 1.0;
        // Rotation mode ω × x, component c.
        if dim == 3 {
            match c {
                0 => {
                    r[(row, 4)] = x[2];
                    r[(row, 5)] = -x[1];
                }
                1 => {
                    r[(row, 3)] = -x[2];
                    r[(row, 5)] = x[0];
                }
                _ => {
                    r[(row, 3)] = x[1];
                    r[(row, 4)] = -x[0];
                }
            }
        } else if c == 0 {
            r[(row, 2)] = -x[1];
        } else {
            r[(row, 2)] = x[0];
        }
    }
    let eig = SymmetricEigen::new(r.transpose() * &r);
    let largest = eig.eigenvalues.amax().max(1.0);
    let mut free_modes = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 1e-10 * largest {
            let v = eig.eigenvectors.column(i);
            free_modes.push(names[v.iamax()]);
        }
    }
    if free_modes.is_empty() {
        Ok(())
    } else {
        free_modes.sort_unstable();
        free_modes.dedup();
        Err(FemError::UnconstrainedRigidMode(free_modes.join(", ")))
    }
}
