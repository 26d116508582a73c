use std::process::{Command, Output};

fn qlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn quotient_suite_passes() {
    let out = qlab(&["verify", "--suite", "quotient", "--n", "2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["schema"], "qlab-report/1");
    assert_eq!(report["suite"], "quotient");
    assert_eq!(report["summary"]["failed"], 0);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"n=2,q=2/quotient/y_zeta"));
    assert!(names.contains(&"n=2,q=2/action/raise"));
}

#[test]
fn d_is_an_alias_for_n() {
    let a = qlab(&["verify", "--suite", "dualpolar-drg", "--d", "2", "--q", "2"]);
    let b = qlab(&["verify", "--suite", "dualpolar-drg", "--n", "2", "--q", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn dualpolar_emit_has_fifteen_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("graph.json");
    let out = qlab(&["dualpolar", "--d", "2", "--q", "2", "--emit", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let g: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(g["schema"], "qlab-dualpolar/1");
    assert_eq!(g["vertices"].as_array().unwrap().len(), 15);
    assert_eq!(g["distance_matrices"].as_array().unwrap().len(), 3);
}

#[test]
fn unsupported_q_is_skipped_not_failed() {
    let out = qlab(&["verify", "--suite", "all", "--q", "7", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["summary"]["failed"], 0);
    let out = qlab(&["verify", "--suite", "ws-decomp", "--q", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert!(report["summary"]["skipped"].as_u64().unwrap() > 0);
    let skip = &report["checks"][0];
    assert_eq!(skip["status"], "skip");
    assert!(skip["witness"].as_str().unwrap().contains("q = 6"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qlab(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(qlab(&["verify"]).status.code(), Some(2));
    assert_eq!(qlab(&["dualpolar", "--d", "2", "--q", "6"]).status.code(), Some(2));
    assert_eq!(qlab(&["verify", "--suite", "hamming", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(qlab(&["export", "--object", "aq", "--n", "2", "--q", "2", "--t", "1/3", "--out", "x.json"]).status.code(), Some(2));
}

#[test]
fn text_format() {
    let out = qlab(&["verify", "--suite", "hamming", "--n", "3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("qlab-report/1 suite=hamming n=3"));
    assert!(text.lines().any(|l| l.starts_with("PASS  n=3/kp/")));
    assert!(text.ends_with(" 0 failed, 0 skipped\n"));
}

#[test]
fn export_lattice_y_n1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y.json");
    let out = qlab(&["export", "--object", "y", "--n", "1", "--q", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m["schema"], "qlab-matrix/1");
    assert_eq!(m["entries"], serde_json::json!([[0, 1, "1|0|0|0"], [1, 0, "1|0|0|0"]]));
}

#[test]
fn export_weighted_cube_with_fractional_t() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    let out = qlab(&["export", "--object", "aq", "--n", "2", "--q", "2", "--t", "-1/2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m["entries"].as_array().unwrap().len(), 8);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qlab(&["verify", "--suite", "cube-tensor", "--n", "3", "--q", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let again = qlab(&["verify", "--suite", "cube-tensor", "--n", "3", "--q", "2"]);
    assert_eq!(std::fs::read(&path).unwrap(), again.stdout);
}
