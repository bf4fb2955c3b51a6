use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn testdata(name: &str) -> String {
    format!("{}/testdata/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epsfree"))
        .args(args)
        .env_remove("EPSFREE_CAP")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn enumerate(graph: &str, tuple: &str) -> Value {
    let out = run(&["enumerate", "--graph", &testdata(graph), "--tuple", tuple]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    json(&out)
}

fn moment_raw(graph: &str, tuple: &str, dist: &str) -> (Option<i32>, Output) {
    let out = run(&[
        "moment",
        "--graph",
        &testdata(graph),
        "--tuple",
        tuple,
        "--dist",
        &testdata(dist),
    ]);
    (out.status.code(), out)
}

fn moment(graph: &str, tuple: &str, dist: &str) -> (Option<i32>, Value) {
    let (code, out) = moment_raw(graph, tuple, dist);
    (code, json(&out))
}

#[test]
fn enumerate_five_cycle_edge() {
    let v = enumerate("five_cycle.json", "x1,x2,x1,x2");
    assert_eq!(v["count"], 3);
    assert_eq!(v["max_crossings"], 0);
    assert_eq!(v["kernel_member"], false);
    assert_eq!(v["regime"], "free");
    assert_eq!(v["identity"]["holds"], true);
    let blocks: Vec<Value> = v["partitions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["blocks"].clone())
        .collect();
    assert!(blocks.contains(&serde_json::json!([[1, 3], [2], [4]])));
}

#[test]
fn enumerate_five_cycle_non_edge() {
    let v = enumerate("five_cycle.json", "x1,x3,x1,x3");
    assert_eq!(v["count"], 4);
    assert_eq!(v["max_crossings"], 1);
    assert_eq!(v["kernel_member"], true);
    assert_eq!(v["regime"], "tensor");
}

#[test]
fn enumerate_constant_tuple_is_catalan() {
    let v = enumerate("five_cycle.json", "x4,x4,x4,x4");
    assert_eq!(v["count"], 14);
    assert_eq!(v["admissible"], false);
    // classical diagonal: all 15 partitions of four points
    assert_eq!(enumerate("classical_diagonal.json", "x,x,x,x")["count"], 15);
}

#[test]
fn moment_five_cycle_semicircles() {
    let (code, v) = moment("five_cycle.json", "x1,x2,x1,x2", "semicircle.json");
    assert_eq!(code, Some(0));
    assert_eq!(v["cumulant"], "0/1");
    assert_eq!(v["definition"], "0/1");
    assert_eq!(v["agree"], true);
    let (code, v) = moment("five_cycle.json", "x1,x3,x1,x3", "semicircle.json");
    assert_eq!(code, Some(0));
    assert_eq!(v["cumulant"], "1/1");
    assert_eq!(v["definition"], "1/1");
}

#[test]
fn moment_factorization_flag() {
    let (code, v) = moment("two_independent.json", "x,y,x,y", "semicircle.json");
    assert_eq!(code, Some(0));
    assert_eq!(v["cumulant"], "1/1");
    assert_eq!(v["factorizes"], true);
    assert_eq!(v["factorized"], "1/1");
    let (_, v) = moment("two_free.json", "x,y,x,y", "semicircle.json");
    assert_eq!(v["factorizes"], false);
}

#[test]
fn moment_single_method() {
    let out = run(&[
        "moment",
        "--graph",
        &testdata("two_free.json"),
        "--tuple",
        "x,y,x,y,x",
        "--dist",
        &testdata("mixed_dists.json"),
        "--method",
        "cumulant",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["cumulant"], "3/8");
    assert!(v.get("definition").is_none());
    assert!(v.get("agree").is_none());
}

#[test]
fn crosscheck_passes() {
    for graph in ["two_free.json", "five_cycle.json"] {
        let out = run(&["crosscheck", "--graph", &testdata(graph), "--max-n", "6"]);
        assert_eq!(out.status.code(), Some(0), "{graph}");
        let v = json(&out);
        assert_eq!(v["passed"], true);
        assert_eq!(v["failed"], 0);
        assert!(v["cases"].as_u64().unwrap() > 100);
    }
}

#[test]
fn crosscheck_with_distribution_file() {
    let out = run(&[
        "crosscheck",
        "--graph",
        &testdata("classical_diagonal.json"),
        "--max-n",
        "5",
        "--seed",
        "7",
        "--dist",
        &testdata("semicircle.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn crosscheck_detects_corrupted_table() {
    let out = run(&[
        "crosscheck",
        "--graph",
        &testdata("two_free.json"),
        "--max-n",
        "4",
        "--corrupt-table",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert!(v["failed"].as_u64().unwrap() > 0);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "crosscheck",
        "--graph",
        &testdata("two_free.json"),
        "--max-n",
        "5",
        "--seed",
        "3",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = [
        "enumerate",
        "--graph",
        &testdata("five_cycle.json"),
        "--tuple",
        "x1,x3,x2,x1,x3",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn input_errors_exit_two() {
    let (code, _) = moment_raw("two_free.json", "x,z", "semicircle.json");
    assert_eq!(code, Some(2));
    let out = run(&[
        "enumerate",
        "--graph",
        &testdata("missing.json"),
        "--tuple",
        "x",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "enumerate",
        "--graph",
        &testdata("two_free.json"),
        "--tuple",
        "x,x,x,x",
        "--cap",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    let out = run(&[
        "crosscheck",
        "--graph",
        &testdata("two_free.json"),
        "--max-n",
        "11",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // order overflow: explicit moments only reach order 4
    let out = run(&[
        "moment",
        "--graph",
        &testdata("two_free.json"),
        "--tuple",
        "x,x,x,x,x",
        "--dist",
        &testdata("mixed_dists.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_epsfree"))
        .args([
            "enumerate",
            "--graph",
            &testdata("two_free.json"),
            "--tuple",
            "x,x,x,x",
        ])
        .env("EPSFREE_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_report_position() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_epsfree"))
        .args(["enumerate", "--graph", "-", "--tuple", "a"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\n  \"labels\": [\"a\",\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn table_output() {
    let out = run(&[
        "moment",
        "--graph",
        &testdata("five_cycle.json"),
        "--tuple",
        "x1,x3,x1,x3",
        "--dist",
        &testdata("semicircle.json"),
        "--table",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cumulant\t1/1\n"));
    assert!(text.contains("agree\ttrue\n"));
}
