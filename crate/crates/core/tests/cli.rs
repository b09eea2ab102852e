//! The binary end to end: exit codes, scene files, figures and the self-test.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SCENE: &str = r#"{
  "schema": 1,
  "tau": 1.0,
  "cones": {
    "A": {"apex": [0, 0, 0], "axis": [0, 0, 1], "half_angle_deg": 45},
    "B": {"apex": [0, 0, 0], "axis": [1, 0, 0], "half_angle_deg": 45},
    "K": {"apex": [0, 0, 0.2], "axis": [0, 0, 1], "half_angle_deg": 30},
    "M": {"apex": [0, 0, -0.2], "axis": [0, 0, -1], "half_angle_deg": 30}
  }
}
"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercone")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scene(dir: &TempDir) -> PathBuf {
    let p = dir.path().join("scene.json");
    std::fs::write(&p, SCENE).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn disjoint_cones_exit_zero_with_a_plane() {
    let dir = TempDir::new().unwrap();
    let o = run(&["check", s(&scene(&dir)), "disjoint", "K", "M"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("true, margin="), "{}", stdout(&o));
}

#[test]
fn tangent_caps_at_a_shared_apex_are_degenerate() {
    let dir = TempDir::new().unwrap();
    let o = run(&["check", s(&scene(&dir)), "disjoint", "A", "B"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("degenerate:"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let sc = scene(&dir);
    assert_eq!(run(&["check", s(&sc), "disjoint", "A"]).status.code(), Some(1));
    assert_eq!(run(&["check", s(&sc), "disjoint", "A", "Nope"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_scene_reports_the_line() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"schema\": 1,\n \"tau\": 1.0,\n oops}\n").unwrap();
    let o = run(&["check", s(&p), "disjoint", "A", "B"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("extra.json");
    std::fs::write(&p, r#"{"schema": 1, "tau": 1.0, "colour": "red"}"#).unwrap();
    assert_eq!(run(&["check", s(&p), "disjoint", "A", "B"]).status.code(), Some(1));
}

#[test]
fn construct_common_complement_and_write_back() {
    let dir = TempDir::new().unwrap();
    let sc = scene(&dir);
    let out = dir.path().join("out.json");
    let o = run(&["construct", s(&sc), "A8", "K", "M", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("status: pass"), "{}", stdout(&o));
    // without --out the input is untouched
    assert_eq!(std::fs::read_to_string(&sc).unwrap(), SCENE);
    for other in ["K", "M"] {
        let o = run(&["check", s(&out), "disjoint", "A8_1", other]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).starts_with("true"), "{}", stdout(&o));
    }
    // constructions accumulate in the written scene
    let again = dir.path().join("again.json");
    let o = run(&["construct", s(&out), "A5", "K", "A", "--out", s(&again)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&again).unwrap();
    assert!(text.contains("\"A8_1\""));
    assert!(text.contains("\"A5w_1_0\""));
}

#[test]
fn construct_path_between_nested_cones() {
    let dir = TempDir::new().unwrap();
    let o = run(&["construct", s(&scene(&dir)), "A5", "K", "A"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("certificate:") && text.contains("status: pass"), "{text}");
    assert!(!text.contains('✗'), "{text}");
}

#[test]
fn render_is_deterministic_and_reports_bad_paths() {
    let dir = TempDir::new().unwrap();
    let sc = scene(&dir);
    let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    for p in [&a, &b] {
        let o = run(&["render", s(&sc), "y=0", "--out", s(p)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let svg = std::fs::read(&a).unwrap();
    assert_eq!(svg, std::fs::read(&b).unwrap());
    assert!(String::from_utf8(svg).unwrap().contains("<polygon"));
    let bad = dir.path().join("missing").join("x.svg");
    assert_eq!(run(&["render", s(&sc), "y=0", "--out", s(&bad)]).status.code(), Some(1));
    let o = run(&["render", s(&sc), "z=2", "--out", s(&a)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selftest_is_deterministic() {
    let a = run(&["--budget", "100", "--seed", "7", "selftest"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(stdout(&a).trim_end().ends_with("properties)"));
    assert!(stdout(&a).contains("result: PASS"));
    let b = run(&["--budget", "100", "--seed", "7", "selftest"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn zero_linear_tolerance_fails_the_selftest() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("tol.json");
    std::fs::write(&p, r#"{"linear": 0}"#).unwrap();
    let o = run(&["--tolerances", s(&p), "--budget", "100", "selftest"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result: FAIL"), "{}", stdout(&o));
}

#[test]
fn invalid_tolerances_are_rejected() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("tol.json");
    std::fs::write(&p, r#"{"shell": -1}"#).unwrap();
    let o = run(&["--tolerances", s(&p), "selftest"]);
    assert_eq!(o.status.code(), Some(1));
}
