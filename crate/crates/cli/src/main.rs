//! `tracshape` command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use tracshape::export::{StlFormat, DEFAULT_EXPORT_SCALE};
use tracshape::pipeline::{self, exit_code, PipelineError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "tracshape", version, about = "Linear-elastic analysis, shape optimization and STL export")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Static analysis: writes solution.vtk and summary.json.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shape optimization: writes history, final mesh, fields and STL.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the boundary of a 3D mesh as STL.
    ExportStl {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        ascii: bool,
        #[arg(long, default_value_t = DEFAULT_EXPORT_SCALE)]
        scale: f64,
    },
    /// Lists faces whose draft angle against the pull direction is too small.
    CheckDraft {
        #[arg(long)]
        mesh: PathBuf,
        /// Unit vector as `x,y,z`.
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        pull: [f64; 3],
        /// degrees
        #[arg(long)]
        min_angle: f64,
    },
    /// Prints counts, regions and validation results of a mesh file.
    MeshInfo {
        #[arg(long)]
        mesh: PathBuf,
    },
}

fn parse_vector(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
    }
    Ok(v)
}

fn print_json<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    // A closed pipe (`| head`) is not an error of the command.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn output_dir(config: &RunConfig, out: Option<PathBuf>) -> Result<PathBuf, PipelineError> {
    out.or_else(|| config.output_dir.clone())
        .ok_or_else(|| PipelineError::Config("no output directory: pass --out or set output_dir".into()))
}

fn run(command: Command) -> Result<i32, PipelineError> {
    match command {
        Command::Solve { config, out } => {
            let cfg = pipeline::load_config(&config)?;
            let out = output_dir(&cfg, out)?;
            print_json(&pipeline::run_solve(&cfg, &out)?);
            Ok(exit_code::SUCCESS)
        }
        Command::Optimize { config, out } => {
            let cfg = pipeline::load_config(&config)?;
            let out = output_dir(&cfg, out)?;
            let summary = pipeline::run_optimize(&cfg, &out)?;
            print_json(&summary);
            if summary.stalled {
                eprintln!("warning: optimization stalled after {} iterations", summary.iterations);
                Ok(exit_code::STALLED)
            } else {
                Ok(exit_code::SUCCESS)
            }
        }
        Command::ExportStl { mesh, out, ascii, scale } => {
            let format = if ascii { StlFormat::Ascii } else { StlFormat::Binary };
            let report = pipeline::export_stl(&mesh, &out, format, scale)?;
            print_json(&report);
            Ok(exit_code::SUCCESS)
        }
        Command::CheckDraft { mesh, pull, min_angle } => {
            print_json(&pipeline::check_draft(&mesh, pull, min_angle)?);
            Ok(exit_code::SUCCESS)
        }
        Command::MeshInfo { mesh } => {
            print_json(&pipeline::mesh_info(Path::new(&mesh))?);
            Ok(exit_code::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit_code::CONFIG as u8 } else { 0 });
        }
    };
    log::debug!("{:?}", cli.command);
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
