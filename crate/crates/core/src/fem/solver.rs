//! Symmetric positive definite solvers: envelope (profile) Cholesky under a
//! reverse Cuthill–McKee ordering, and Jacobi-preconditioned conjugate
//! gradients.

use serde::{Deserialize, Serialize};

use super::sparse::CsrMatrix;
use super::FemError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// Direct for small systems or a modest envelope, PCG otherwise.
    #[default]
    Auto,
    Direct,
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub kind: SolverKind,
    pub rtol: f64,
    /// Defaults to 20 × system size.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            kind: SolverKind::Auto,
            rtol: 1e-10,
            max_iterations: None,
        }
    }
}

/// Systems below this size always go to the direct solver under `Auto`.
pub const DIRECT_DOF_THRESHOLD: usize = 3000;
/// Larger systems still use the direct solver when the envelope has at
/// most this many entries.
const DIRECT_ENVELOPE_LIMIT: usize = 20_000_000;

/// A factorization or iterative context that can solve repeated right-hand
/// sides against the same operator.
pub enum LinearSolver {
    Direct { matrix: CsrMatrix, factor: ProfileCholesky },
    Cg { matrix: CsrMatrix, rtol: f64, max_iterations: usize },
}

impl LinearSolver {
    pub fn new(matrix: CsrMatrix, opts: &SolverOptions) -> Result<Self, FemError> {
        let n = matrix.dim();
        let max_iterations = opts.max_iterations.unwrap_or(20 * n.max(1));
        let direct = match opts.kind {
            SolverKind::Direct => true,
            SolverKind::ConjugateGradient => false,
            SolverKind::Auto => n < DIRECT_DOF_THRESHOLD || {
                let perm = reverse_cuthill_mckee(&matrix);
                envelope_size(&matrix, &perm) <= DIRECT_ENVELOPE_LIMIT
            },
        };
        if direct {
            let factor = ProfileCholesky::factor(&matrix)?;
            Ok(LinearSolver::Direct { matrix, factor })
        } else {
            Ok(LinearSolver::Cg {
                matrix,
                rtol: opts.rtol,
                max_iterations,
            })
        }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        match self {
            LinearSolver::Direct { matrix, .. } | LinearSolver::Cg { matrix, .. } => matrix,
        }
    }

    pub fn is_direct(&self) -> bool {
        matches!(self, LinearSolver::Direct { .. })
    }

    /// Solves `A x = b`; the relative residual is at most `rtol`.
    pub fn solve(&self, b: &[f64], rtol: f64) -> Result<Vec<f64>, FemError> {
        let bnorm = norm(b);
        if bnorm == 0.0 {
            return Ok(vec![0.0; b.len()]);
        }
        match self {
            LinearSolver::Direct { matrix, factor } => {
                let mut x = factor.solve(b);
                // Refinement against a compensated residual: converges to a
                // nearly correctly rounded solution, so nearby systems give
                // consistently rounded answers.
                let mut last = f64::INFINITY;
                for _ in 0..6 {
                    let dx = factor.solve(&accurate_residual(matrix, &x, b));
                    let step = norm(&dx);
                    for (xi, di) in x.iter_mut().zip(&dx) {
                        *xi += di;
                    }
                    if step <= 4.0 * f64::EPSILON * norm(&x) || step >= 0.5 * last {
                        break;
                    }
                    last = step;
                }
                let res = norm(&residual(matrix, &x, b));
                if res <= rtol * attainable_scale(matrix, &x, bnorm) {
                    Ok(x)
                } else {
                    Err(FemError::NonConvergence {
                        iterations: 0,
                        residual: res / bnorm,
                    })
                }
            }
            LinearSolver::Cg {
                matrix,
                rtol: own,
                max_iterations,
            } => pcg(matrix, b, rtol.min(*own), *max_iterations),
        }
    }
}

/// `max(‖b‖, ‖ |A| |x| ‖)`: the residual of a rounded solution cannot fall
/// much below `ε ‖ |A| |x| ‖`, which exceeds `ε ‖b‖` for slender structures.
pub(crate) fn attainable_scale(a: &CsrMatrix, x: &[f64], bnorm: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..a.dim() {
        let (cols, vals) = a.row(i);
        let r: f64 = cols.iter().zip(vals).map(|(&c, v)| (v * x[c]).abs()).sum();
        s += r * r;
    }
    bnorm.max(s.sqrt())
}

/// `b − A x` with error-free products and compensated sums.
fn accurate_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.dim())
        .map(|i| {
            let (cols, vals) = a.row(i);
            let (mut sum, mut comp) = (b[i], 0.0);
            for (&c, &v) in cols.iter().zip(vals) {
                let p = -v * x[c];
                let e = (-v).mul_add(x[c], -p);
                let t = sum + p;
                comp += if sum.abs() >= p.abs() { (sum - t) + p } else { (p - t) + sum } + e;
                sum = t;
            }
            sum + comp
        })
        .collect()
}

fn residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    b.iter().zip(ax).map(|(bi, ai)| bi - ai).collect()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
pub fn pcg(a: &CsrMatrix, b: &[f64], rtol: f64, max_iterations: usize) -> Result<Vec<f64>, FemError> {
    let n = a.dim();
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|&d| d <= 0.0) {
        return Err(FemError::Singular(format!("non-positive diagonal at reduced dof {i}")));
    }
    let inv: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iterations {
        if norm(&r) <= rtol * bnorm {
            return Ok(x);
        }
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(FemError::Singular(format!("operator not positive definite (iteration {it})")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * inv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = norm(&r) / bnorm;
    if res <= rtol {
        Ok(x)
    } else {
        Err(FemError::NonConvergence {
            iterations: max_iterations,
            residual: res,
        })
    }
}

/// Reverse Cuthill–McKee ordering; `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(a, seed, &degree);
        visited[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut next: Vec<usize> = a.row(v).0.iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                order.push(w);
            }
        }
    }
    order.reverse();
    order
}

/// Repeated BFS to the farthest lowest-degree node.
fn pseudo_peripheral(a: &CsrMatrix, seed: usize, degree: &[usize]) -> usize {
    let mut start = seed;
    let mut best_depth = 0;
    for _ in 0..4 {
        let levels = bfs_levels(a, start);
        let depth = *levels.iter().filter_map(|l| l.as_ref()).max().unwrap_or(&0);
        if depth <= best_depth && start != seed {
            break;
        }
        best_depth = depth;
        let candidate = (0..a.dim())
            .filter(|&i| levels[i] == Some(depth))
            .min_by_key(|&i| (degree[i], i))
            .unwrap_or(start);
        if candidate == start {
            break;
        }
        start = candidate;
    }
    start
}

fn bfs_levels(a: &CsrMatrix, start: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; a.dim()];
    level[start] = Some(0);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let lv = level[v].unwrap();
        for &w in a.row(v).0 {
            if level[w].is_none() {
                level[w] = Some(lv + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

fn first_columns(a: &CsrMatrix, perm: &[usize]) -> Vec<usize> {
    let n = a.dim();
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    (0..n)
        .map(|i| {
            a.row(perm[i])
                .0
                .iter()
                .map(|&c| inv[c])
                .filter(|&c| c <= i)
                .min()
                .unwrap_or(i)
        })
        .collect()
}

fn envelope_size(a: &CsrMatrix, perm: &[usize]) -> usize {
    first_columns(a, perm).iter().enumerate().map(|(i, f)| i - f + 1).sum()
}

/// Envelope Cholesky factor `P A Pᵀ = L Lᵀ`, row-wise storage.
#[derive(Debug, Clone)]
pub struct ProfileCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl ProfileCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self, FemError> {
        let n = a.dim();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let first = first_columns(a, &perm);
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            let (cols, vals) = a.row(perm[i]);
            for (&c, &v) in cols.iter().zip(vals) {
                let j = inv[c];
                if j <= i {
                    data[start[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let si = start[i];
            let diag_in = data[si + i - fi];
            for j in fi..i {
                let fj = first[j];
                let sj = start[j];
                let k0 = fi.max(fj);
                let (row_i, row_j) = (&data[si + k0 - fi..si + j - fi], &data[sj + k0 - fj..sj + j - fj]);
                let s: f64 = row_i.iter().zip(row_j).map(|(x, y)| x * y).sum();
                let ljj = data[sj + j - fj];
                data[si + j - fi] = (data[si + j - fi] - s) / ljj;
            }
            let row = &data[si..si + i - fi];
            let d = diag_in - row.iter().map(|x| x * x).sum::<f64>();
            if !(d > 1e-13 * diag_in.abs()) || !d.is_finite() {
                return Err(FemError::Singular(format!(
                    "zero pivot at reduced dof {} during factorization",
                    perm[i]
                )));
            }
            data[si + i - fi] = d.sqrt();
        }
        Ok(ProfileCholesky { perm, first, start, data })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let si = self.start[i];
            let s: f64 = self.data[si..si + i - fi].iter().zip(&y[fi..i]).map(|(l, y)| l * y).sum();
            y[i] = (y[i] - s) / self.data[si + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let si = self.start[i];
            y[i] /= self.data[si + i - fi];
            let yi = y[i];
            for (k, l) in (fi..i).zip(&self.data[si..si + i - fi]) {
                y[k] -= l * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Laplacian plus a small shift: SPD, tridiagonal.
    fn laplacian(n: usize) -> CsrMatrix {
        let rows = (0..n)
            .map(|i| (i.saturating_sub(1)..=(i + 1).min(n - 1)).collect())
            .collect();
        let mut a = CsrMatrix::from_pattern(rows);
        for i in 0..n {
            a.add_at(i, i, 2.01);
            if i > 0 {
                a.add_at(i, i - 1, -1.0);
                a.add_at(i - 1, i, -1.0);
            }
        }
        a
    }

    #[test]
    fn direct_and_cg_agree_with_dense() {
        let a = laplacian(50);
        let b: Vec<f64> = (0..50).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let dense = a.to_dense().cholesky().unwrap().solve(&nalgebra::DVector::from_vec(b.clone()));
        let x1 = ProfileCholesky::factor(&a).unwrap().solve(&b);
        let x2 = pcg(&a, &b, 1e-12, 1000).unwrap();
        for i in 0..50 {
            assert!((x1[i] - dense[i]).abs() < 1e-10 * dense.amax());
            assert!((x2[i] - dense[i]).abs() < 1e-9 * dense.amax());
        }
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = laplacian(20);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort();
        assert_eq!(p, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = CsrMatrix::from_pattern(vec![vec![0, 1], vec![0, 1]]);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            a.add_at(i, j, 1.0);
        }
        assert!(matches!(ProfileCholesky::factor(&a), Err(FemError::Singular(_))));
    }

    #[test]
    fn cg_iteration_cap_is_reported() {
        let a = laplacian(200);
        let b = vec![1.0; 200];
        assert!(matches!(pcg(&a, &b, 1e-14, 3), Err(FemError::NonConvergence { .. })));
    }
}
