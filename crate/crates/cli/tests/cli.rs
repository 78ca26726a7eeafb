use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tracshape::mesh::fixtures::unit_cube;
use tracshape::mesh::{make_fixture, save_mesh};

fn tracshape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tracshape")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const BAR: &str = r#"{
  "mesh": {"fixture": "bar3d"},
  "material": "paper-steel",
  "loads": {
    "dirichlet": [
      {"region": "pin", "fixed": [true, false, false]},
      {"region": "anchor", "fixed": [false, true, true]},
      {"region": "anchor_y", "fixed": [false, false, true]}
    ],
    "neumann": [{"region": "load", "total_force": [110000, 0, 0]}]
  }
}"#;

#[test]
fn solve_writes_outputs_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bar.json", BAR);
    let out = dir.path().join("out");
    let o = tracshape(&["solve", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stdout_json(&o);
    let mpa = summary["max_vm_MPa"].as_f64().unwrap();
    assert!((mpa - 11.0).abs() <= 0.11, "{mpa}");
    assert!(out.join("solution.vtk").is_file());
    let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(on_disk, summary);
}

#[test]
fn output_dir_falls_back_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let text = BAR.replacen('{', r#"{"output_dir": "from_config","#, 1);
    let cfg = write(dir.path(), "bar.json", &text);
    let o = tracshape(&["solve", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("from_config/summary.json").is_file());
}

#[test]
fn missing_output_dir_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bar.json", BAR);
    let o = tracshape(&["solve", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("output"));
}

#[test]
fn config_and_argument_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = tracshape(&["solve", "--config", s(&dir.path().join("absent.json")), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let bad = write(dir.path(), "bad.json", r#"{"mesh": {"fixture": "bar3d"}, "bogus": 1}"#);
    assert_eq!(tracshape(&["solve", "--config", s(&bad), "--out", s(&out)]).status.code(), Some(1));
    let no_problem = write(dir.path(), "np.json", BAR);
    assert_eq!(tracshape(&["optimize", "--config", s(&no_problem), "--out", s(&out)]).status.code(), Some(1));
    assert_eq!(tracshape(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tracshape(&["check-draft", "--mesh", "m.json", "--pull", "0,1", "--min-angle", "2"]).status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn unsupported_structure_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "free.json",
        r#"{"mesh": {"fixture": "bar3d", "params": {"n": 2}}, "loads": {"neumann": [{"region": "load", "total_force": [1, 0, 0]}]}}"#,
    );
    let out = dir.path().join("out");
    let o = tracshape(&["solve", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.join("summary.json").exists());
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(tracshape(&["--help"]).status.code(), Some(0));
    assert_eq!(tracshape(&["--version"]).status.code(), Some(0));
}

#[test]
fn optimize_zero_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "opt.json",
        r#"{
          "mesh": {"fixture": "plate_with_hole2d"},
          "loads": {"dirichlet": [{"region": "pin"}], "neumann": [{"region": "load", "total_force": [20000, 0, 0]}]},
          "problem": {"mode": "compliance-min-volume-constrained", "max_steps": 0}
        }"#,
    );
    let out = dir.path().join("out");
    let o = tracshape(&["optimize", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["iterations"], 0);
    for f in ["history.csv", "history.svg", "final_mesh.json", "final_solution.vtk", "summary.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn export_stl_and_check_draft_on_cube() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = write(dir.path(), "cube.json", &save_mesh(&unit_cube()));
    let stl = dir.path().join("cube.stl");
    let o = tracshape(&["export-stl", "--mesh", s(&mesh), "--out", s(&stl)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["watertight"], true);
    assert_eq!(std::fs::read(&stl).unwrap().len(), 84 + 12 * 50);

    let o = tracshape(&["export-stl", "--mesh", s(&mesh), "--out", s(&stl), "--ascii", "--scale", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&stl).unwrap().starts_with("solid"));

    let o = tracshape(&["check-draft", "--mesh", s(&mesh), "--pull", "0,0,1", "--min-angle", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["violations"].as_array().unwrap().len(), 8);
    let o = tracshape(&["check-draft", "--mesh", s(&mesh), "--pull", "0,0,-1", "--min-angle", "0"]);
    assert_eq!(stdout_json(&o)["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn two_dimensional_mesh_cannot_be_exported() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = make_fixture("plate_with_hole2d", &Default::default()).unwrap();
    let path = write(dir.path(), "plate.json", &save_mesh(&mesh));
    let o = tracshape(&["export-stl", "--mesh", s(&path), "--out", s(&dir.path().join("p.stl"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mesh_info_lists_regions() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = make_fixture("lug3d", &Default::default()).unwrap();
    let path = write(dir.path(), "lug.json", &save_mesh(&mesh));
    let o = tracshape(&["mesh-info", "--mesh", s(&path)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let info = stdout_json(&o);
    assert_eq!(info["dimension"], 3);
    assert_eq!(info["nodes"].as_u64().unwrap() as usize, mesh.node_count());
    assert_eq!(info["regions"]["load"][0], "facets");
    assert_eq!(info["regions"]["pin"][0], "nodes");
}

#[test]
fn stalled_optimization_exits_3_with_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "stall.json",
        r#"{
          "mesh": {"fixture": "plate_with_hole2d"},
          "loads": {"dirichlet": [{"region": "pin"}], "neumann": [{"region": "load", "total_force": [20000, 0, 0]}]},
          "problem": {"mode": "compliance-min-volume-constrained", "max_steps": 10, "step": {"quality_floor": 0.99}}
        }"#,
    );
    let out = dir.path().join("out");
    let o = tracshape(&["optimize", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["stalled"], true);
    assert!(out.join("summary.json").is_file());
    assert!(out.join("history.csv").is_file());
}

#[test]
fn shipped_configs_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    for (name, command) in [("bar_solve", "solve"), ("plate_optimize", "optimize"), ("lug_optimize", "optimize")] {
        let out = dir.path().join(name);
        let cfg = root.join(format!("{name}.json"));
        let o = tracshape(&[command, "--config", s(&cfg), "--out", s(&out)]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join("summary.json").is_file());
    }
}
