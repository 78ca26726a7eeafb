//! Configuration-driven runs: static analysis, optimization and export, with
//! CSV/SVG history, VTK field and JSON summary output.

mod config;
mod fields;
mod history;
mod run;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::export::ExportError;
use crate::fem::FemError;
use crate::mesh::MeshError;
use crate::shape::ShapeError;

pub use config::{load_config, MaterialSpec, MeshSpec, RunConfig};
pub use fields::write_fields;
pub use history::{history_csv, history_svg, write_history, HISTORY_HEADER};
pub use run::{
    check_draft, export_stl, load_mesh_file, mesh_info, run_optimize, run_solve, MeshInfo, OptimizeSummary, SolveSummary,
};

/// Process exit codes of the command-line front end.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const FAILURE: i32 = 2;
    pub const STALLED: i32 = 3;
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read {}: {source}", path.display())]
    Input { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
    #[error("mesh error: {0}")]
    Mesh(#[from] MeshError),
    #[error("analysis failed: {0}")]
    Fem(#[from] FemError),
    #[error("optimization failed: {0}")]
    Shape(#[from] ShapeError),
    #[error("export failed: {0}")]
    Export(#[from] ExportError),
}

impl PipelineError {
    /// 1 for anything wrong with the inputs, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Input { .. } | PipelineError::Mesh(_) => exit_code::CONFIG,
            PipelineError::Export(
                ExportError::Mesh(_)
                | ExportError::NotThreeDimensional(_)
                | ExportError::InvalidPull(_)
                | ExportError::InvalidAngle(_)
                | ExportError::InvalidScale(_),
            ) => exit_code::CONFIG,
            _ => exit_code::FAILURE,
        }
    }
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    let err = |source| PipelineError::Output {
        path: path.to_path_buf(),
        source,
    };
    let name = path.file_name().ok_or_else(|| err(io::Error::other("not a file path")))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes).map_err(err)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        err(e)
    })
}
