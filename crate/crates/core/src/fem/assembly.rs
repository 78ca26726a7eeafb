use super::element::stiffness_of;
use super::sparse::CsrMatrix;
use super::{FemError, Material};
use crate::mesh::Mesh;

/// Node-block sparsity pattern of the global stiffness operator.
pub(crate) fn stiffness_pattern(mesh: &Mesh) -> CsrMatrix {
    let dim = mesh.dimension();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); mesh.node_count()];
    for el in mesh.elements() {
        for &a in el {
            adjacency[a].extend_from_slice(el);
        }
    }
    let mut rows = Vec::with_capacity(mesh.dof_count());
    for adj in &mut adjacency {
        adj.sort_unstable();
        adj.dedup();
        let cols: Vec<usize> = adj.iter().flat_map(|&b| (0..dim).map(move |j| dim * b + j)).collect();
        for _ in 0..dim {
            rows.push(cols.clone());
        }
    }
    CsrMatrix::from_pattern(rows)
}

/// Scatter-adds element stiffness matrices in element order. The result is
/// bit-identical for identical input.
pub fn assemble(mesh: &Mesh, material: &Material) -> Result<CsrMatrix, FemError> {
    material.validate()?;
    let dim = mesh.dimension();
    let mut k = stiffness_pattern(mesh);
    for (e, el) in mesh.elements().enumerate() {
        let simplex = mesh.simplex(e).ok_or(FemError::DegenerateElement(Some(e)))?;
        let ke = stiffness_of(&simplex, material);
        for (la, &a) in el.iter().enumerate() {
            for i in 0..dim {
                let row = dim * a + i;
                for (lb, &b) in el.iter().enumerate() {
                    for j in 0..dim {
                        k.add_at(row, dim * b + j, ke[(dim * la + i, dim * lb + j)]);
                    }
                }
            }
        }
    }
    Ok(k)
}
