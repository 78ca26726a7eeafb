use std::fmt::Write as _;

use crate::fem::{FemError, Solution};
use crate::mesh::Mesh;

/// Legacy VTK 3.0 ASCII unstructured grid with nodal displacement and
/// element von Mises stress.
pub fn write_fields(mesh: &Mesh, solution: &Solution) -> Result<String, FemError> {
    if solution.displacement.len() != mesh.node_count() || solution.von_mises.len() != mesh.element_count() {
        return Err(FemError::Mismatch(format!(
            "solution has {} nodes and {} elements, mesh has {} and {}",
            solution.displacement.len(),
            solution.von_mises.len(),
            mesh.node_count(),
            mesh.element_count()
        )));
    }
    let k = mesh.nodes_per_element();
    let cell_type = if mesh.dimension() == 3 { 10 } else { 5 };
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\ntracshape solution\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.node_count());
    for p in mesh.nodes() {
        let _ = writeln!(s, "{:e} {:e} {:e}", p[0], p[1], p[2]);
    }
    let m = mesh.element_count();
    let _ = writeln!(s, "CELLS {m} {}", m * (k + 1));
    for el in mesh.elements() {
        s.push_str(&k.to_string());
        for n in el {
            let _ = write!(s, " {n}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {m}");
    for _ in 0..m {
        let _ = writeln!(s, "{cell_type}");
    }
    let _ = writeln!(s, "POINT_DATA {}", mesh.node_count());
    s.push_str("VECTORS displacement double\n");
    for d in &solution.displacement {
        let _ = writeln!(s, "{:e} {:e} {:e}", d[0], d[1], d[2]);
    }
    let _ = writeln!(s, "CELL_DATA {m}");
    s.push_str("SCALARS von_mises double 1\nLOOKUP_TABLE default\n");
    for v in &solution.von_mises {
        let _ = writeln!(s, "{v:e}");
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use nalgebra::Matrix3;
    use vtkio::model::{Attribute, CellType, DataSet, IOBuffer, Piece, VertexNumbers};

    use super::*;
    use crate::fem::{solve_static, LoadCase, Material, SolverOptions};
    use crate::mesh::make_fixture;

    fn parse(text: &str) -> vtkio::model::Vtk {
        vtkio::Vtk::parse_legacy_be(text.as_bytes()).unwrap()
    }

    fn grid(vtk: &vtkio::model::Vtk) -> &vtkio::model::UnstructuredGridPiece {
        match &vtk.data {
            DataSet::UnstructuredGrid { pieces, .. } => match &pieces[0] {
                Piece::Inline(p) => p,
                _ => panic!("expected inline piece"),
            },
            _ => panic!("expected unstructured grid"),
        }
    }

    fn f64s(buf: &IOBuffer) -> Vec<f64> {
        match buf {
            IOBuffer::F64(v) => v.clone(),
            other => panic!("unexpected buffer {other:?}"),
        }
    }

    #[test]
    fn single_tet_parses_in_independent_reader() {
        let mesh = crate::mesh::Mesh::new(
            3,
            1.0,
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            vec![0, 1, 2, 3],
            vec![],
        )
        .unwrap();
        let sol = Solution {
            displacement: vec![[0.0; 3]; 4],
            stress: vec![Matrix3::zeros()],
            von_mises: vec![0.0],
            compliance: 0.0,
            reaction: [0.0; 3],
        };
        let vtk = parse(&write_fields(&mesh, &sol).unwrap());
        let g = grid(&vtk);
        assert_eq!(f64s(&g.points).len(), 12);
        assert_eq!(g.cells.types, vec![CellType::Tetra]);
        match &g.cells.cell_verts {
            VertexNumbers::Legacy { num_cells, vertices } => {
                assert_eq!(*num_cells, 1);
                assert_eq!(vertices, &vec![4, 0, 1, 2, 3]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn plate_von_mises_survives_the_reader() {
        let mesh = make_fixture("plate_with_hole2d", &Default::default()).unwrap();
        let loads = LoadCase::pinned_with_force("pin", "load", [2e4, 0.0, 0.0]);
        let sol = solve_static(&mesh, &Material::default(), &loads, &SolverOptions::default()).unwrap();
        let vtk = parse(&write_fields(&mesh, &sol).unwrap());
        let g = grid(&vtk);
        assert!(g.cells.types.iter().all(|t| *t == CellType::Triangle));
        let vm = g
            .data
            .cell
            .iter()
            .find_map(|a| match a {
                Attribute::DataArray(d) if d.name == "von_mises" => Some(f64s(&d.data)),
                _ => None,
            })
            .unwrap();
        assert_eq!(vm.len(), mesh.element_count());
        let max = vm.iter().copied().fold(0.0, f64::max);
        assert!((max - sol.max_von_mises()).abs() <= 1e-9 * sol.max_von_mises());
        let disp = g
            .data
            .point
            .iter()
            .find_map(|a| match a {
                Attribute::DataArray(d) if d.name == "displacement" => Some(f64s(&d.data)),
                _ => None,
            })
            .unwrap();
        assert_eq!(disp.len(), 3 * mesh.node_count());
    }

    #[test]
    fn cell_count_matches_for_every_fixture() {
        for name in crate::mesh::fixtures::FIXTURE_NAMES {
            let mesh = make_fixture(name, &Default::default()).unwrap();
            let sol = Solution {
                displacement: vec![[0.0; 3]; mesh.node_count()],
                stress: vec![Matrix3::zeros(); mesh.element_count()],
                von_mises: vec![0.0; mesh.element_count()],
                compliance: 0.0,
                reaction: [0.0; 3],
            };
            let text = write_fields(&mesh, &sol).unwrap();
            let scalars = text.split("LOOKUP_TABLE default\n").nth(1).unwrap().lines().count();
            assert_eq!(scalars, mesh.element_count(), "{name}");
        }
    }

    #[test]
    fn mismatch_is_an_error() {
        let mesh = make_fixture("bar3d", &Default::default()).unwrap();
        let sol = Solution {
            displacement: vec![[0.0; 3]; 3],
            stress: vec![],
            von_mises: vec![],
            compliance: 0.0,
            reaction: [0.0; 3],
        };
        assert!(matches!(write_fields(&mesh, &sol), Err(FemError::Mismatch(_))));
    }
}
