use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_socle"));
    for var in ["SOCLE_TOL_RANK", "SOCLE_TOL_CLUSTER", "SOCLE_TOL_RESIDUAL"] {
        c.env_remove(var);
    }
    c
}

fn worked_example() -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances/worked_example.json");
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().last().expect("some output")).unwrap()
}

fn without_wall_time(text: &[u8]) -> String {
    String::from_utf8_lossy(text)
        .lines()
        .map(|l| {
            let mut v: Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("wall_time");
            v.to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn rank_and_trace_of_worked_example() {
    let out = run(&["rank", &worked_example(), "a"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rank"], 4);
    assert_eq!(v["rank_direct"], 4);
    assert_eq!(v["spectral_rank"], 4);

    let v = json(&run(&["trace", &worked_example(), "a"]));
    assert!(v["trace"][0].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn shoda_certificate_and_obstruction() {
    let out = run(&["shoda", &worked_example(), "a"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["certificate"]["residual"].as_f64().unwrap() <= 1e-8);
    assert!(v["certificate"]["rank_x"].as_u64().unwrap() <= 4);
    assert!(v["corner_square_route"].is_null());

    let out = run(&["shoda", &worked_example(), "b"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["member"], false);
    let failed = &v["checks"][0];
    assert_eq!(failed["pass"], false);
    assert!(failed["witness"]["component_traces"].is_array());
}

#[test]
fn ideal_of_a_minimal_projection() {
    let v = json(&run(&["ideal", &worked_example(), "p"]));
    assert_eq!(v["dim"], 4);
    assert_eq!(v["minimal"], true);
    assert_eq!(v["block_index"], 0);
    assert_eq!(v["tensor_model"]["dim_ap"], 2);
    assert_eq!(v["pass"], true);
}

#[test]
fn spectrum_and_diagonalize() {
    let v = json(&run(&["spectrum", &worked_example(), "a"]));
    let mults: Vec<u64> =
        v["spectrum"].as_array().unwrap().iter().map(|t| t["multiplicity"].as_u64().unwrap()).collect();
    assert_eq!(mults, vec![2, 2]);
    let out = run(&["diagonalize", &worked_example(), "a", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["terms"].as_array().unwrap().len(), 4);
}

#[test]
fn generated_field_is_central() {
    let gen = run(&["gen", "--sizes", "1", "--seed", "0"]);
    assert_eq!(gen.status.code(), Some(0));
    let mut child = bin().args(["central", "-"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(&gen.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let preds = v["harness"]["predicates"].as_array().unwrap();
    assert!(preds[..5].iter().all(|p| p["value"] == true));
}

#[test]
fn scrambled_instance_decomposes_and_reuses_the_iso() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let iso = dir.path().join("iso.json");
    let gen = run(&["gen", "--sizes", "3,1", "--seed", "7", "--scramble"]);
    std::fs::write(&inst, &gen.stdout).unwrap();
    let out = run(&["decompose", inst.to_str().unwrap(), "--seed", "7", "-o", iso.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut sizes: Vec<u64> = json(&out)["sizes"].as_array().unwrap().iter().map(|s| s.as_u64().unwrap()).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 3]);
    let v = json(&run(&["rank", inst.to_str().unwrap(), "a", "--iso", iso.to_str().unwrap()]));
    assert_eq!(v["rank"], 4);
}

#[test]
fn reports_are_deterministic() {
    let instance = worked_example();
    for args in
        [vec!["rank", instance.as_str(), "a"], vec!["check", "--suite", "all", "--seeds", "0..2", "--sizes", "2,1;1,1"]]
    {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(without_wall_time(&a.stdout), without_wall_time(&b.stdout));
    }
}

#[test]
fn sweep_emits_one_line_per_instance_and_a_summary() {
    let out = run(&["check", "--suite", "central", "--seeds", "0..3", "--sizes", "2;1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[6]["instances"], 6);
    assert_eq!(lines[6]["pass"], true);
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"algebra\": {\"kind\": \"blocks\", \"sizes\": [2,]}\n}").unwrap();
    let out = run(&["rank", bad.to_str().unwrap(), "a"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["line"], 2);
    assert!(v["column"].as_u64().unwrap() > 0);

    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["rank", &worked_example(), "missing"]).status.code(), Some(2));
    assert_eq!(run(&["ideal", &worked_example(), "a"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--seeds", "5..1"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--sizes", "0"]).status.code(), Some(2));
    let out = bin().env("SOCLE_TOL_RANK", "-1").args(["rank", &worked_example(), "a"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn environment_tolerances_apply() {
    let out = bin().env("SOCLE_TOL_CLUSTER", "1e-4").args(["rank", &worked_example(), "a"]).output().unwrap();
    assert_eq!(json(&out)["tolerances"]["cluster_tol"], 1e-4);
}

#[test]
fn impossible_residual_is_a_numeric_failure() {
    let out = bin().env("SOCLE_TOL_RESIDUAL", "1e-300").args(["shoda", &worked_example(), "a"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}
