use std::path::Path;
use std::process::{Command, Output};

fn eqpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqpoly")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_prints_one_coefficient_per_line() {
    let o = eqpoly(&["count", "--kind", "equivariant", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2\n15\n117\n877\n6719\n");
}

#[test]
fn decide_reports_json() {
    let o = eqpoly(&["decide", "--model", "node", "--h", "ij,jk,ik->ii", "--simple"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["computable"], false);
}

#[test]
fn exit_codes() {
    assert_eq!(eqpoly(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(eqpoly(&["count", "--kind", "invariant"]).status.code(), Some(1));
    assert_eq!(eqpoly(&["decide", "--model", "edge", "--h", "ab,b"]).status.code(), Some(2));
    assert_eq!(eqpoly(&["--help"]).status.code(), Some(0));
    let guarded = Command::new(env!("CARGO_BIN_EXE_eqpoly"))
        .args(["enumerate", "--max-degree", "3"])
        .env("EQPOLY_MAX_CLASSES", "5")
        .output()
        .unwrap();
    assert_eq!(guarded.status.code(), Some(2));
}

#[test]
fn eval_reads_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.json");
    std::fs::write(&path, r#"{"n": 3, "edges": [[0, 1], [1, 2], [0, 2]]}"#).unwrap();
    let p = path.to_str().unwrap();
    for extra in [&[][..], &["--naive"][..]] {
        let mut args = vec!["eval", "--h", "ij,jk,ik->ii", "--graph", p];
        args.extend_from_slice(extra);
        let o = eqpoly(&args);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), "[2,2,2]");
    }
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"{"n": 2, "matrix": [[0.5, 1.0], [2.0, 0.0]]}"#).unwrap();
    let o = eqpoly(&["eval", "--h", "ij->ij", "--graph", path.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "[[0.5,1.0],[2.0,0.0]]");
}

#[test]
fn features_to_stdout_matches_file() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic20.jsonl");
    let d = data.to_str().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.json");
    let common = ["features", "--model", "node", "--min-degree", "3", "--max-degree", "4", "--dataset", d];
    let to_file = eqpoly(&[&common[..], &["--out", out.to_str().unwrap()]].concat());
    assert_eq!(to_file.status.code(), Some(0));
    let piped = eqpoly(&common);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout(&piped));
}

#[test]
fn features_rejects_bad_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    std::fs::write(&path, "{\"id\":\"loop\",\"n\":2,\"edges\":[[1,1]]}\n").unwrap();
    let o = eqpoly(&[
        "features", "--model", "edge", "--min-degree", "5", "--max-degree", "5", "--dataset",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("loop"));
}
