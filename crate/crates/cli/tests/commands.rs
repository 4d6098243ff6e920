use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn sgc(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sgc"));
    cmd.args(args).env_remove("SGC_ORACLE_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn config(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name]
        .iter()
        .collect();
    p.to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn bounds_for_the_2of4_example() {
    let out = sgc(&["bounds", &config("ex3.json")], &[]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["C"], 5);
    assert_eq!(v["beta_star"], 9);
    assert_eq!(v["gap"], false);
}

#[test]
fn bounds_report_the_gap_on_the_2of5_instance() {
    let v = json(&sgc(&["bounds", &config("fig4.json")], &[]));
    assert_eq!(v["C"], "5/3");
    assert_eq!(v["rate_upper"], 2);
    assert_eq!(v["gap"], true);
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"K\": 4,\n \"qualified\": [1,}\n").unwrap();
    let out = sgc(&["bounds", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn missing_file_exits_2() {
    let out = sgc(&["bounds", "/nonexistent/config.json"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_multicast_example() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let out = sgc(&["synth", &config("ex2.json"), "-o", path.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((v["Lw"].as_u64(), v["Lx"].as_u64()), (Some(3), Some(6)));
    assert_eq!(v["meta"]["builder"], "multicast_k4_bw");
}

#[test]
fn synth_refuses_open_settings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let out = sgc(&["synth", &config("open_2of5.json"), "-o", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("N=2 of K=5"));
    assert!(!path.exists());
}

#[test]
fn two_seeds_both_verify() {
    let dir = tempfile::tempdir().unwrap();
    let mut matrices = Vec::new();
    for seed in ["1", "2"] {
        let path = dir.path().join(format!("s{seed}.json"));
        let p = path.to_str().unwrap();
        assert!(sgc(&["synth", &config("ex4.json"), "-o", p, "--seed", seed], &[])
            .status
            .success());
        let out = sgc(&["verify", p], &[]);
        assert!(out.status.success());
        assert_eq!(json(&out)["passed"], true);
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        matrices.push(v["A"].clone());
    }
    assert_eq!(matrices.len(), 2);
}

fn synth_ex3(dir: &tempfile::TempDir) -> PathBuf {
    let path = dir.path().join("ex3.json");
    assert!(sgc(&["synth", &config("ex3.json"), "-o", path.to_str().unwrap()], &[])
        .status
        .success());
    path
}

#[test]
fn verify_emitted_scheme_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth_ex3(&dir);
    let out = sgc(&["verify", path.to_str().unwrap(), "--oracle"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["oracle"]["passed"], true);
    assert_eq!(v["oracle"]["states"], "524288");
}

#[test]
fn corrupted_scheme_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth_ex3(&dir);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // the first message symbol disappears from every row
    for row in v["A"].as_array_mut().unwrap() {
        row[0] = 0.into();
    }
    std::fs::write(&path, v.to_string()).unwrap();
    let out = sgc(&["verify", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(5));
    let rep = json(&out);
    assert_eq!(rep["passed"], false);
    assert_eq!(rep["failing_receivers"], serde_json::json!([1, 2]));
    assert!(stderr(&out).contains("receivers 1, 2"));
}

#[test]
fn leaky_scheme_names_the_eavesdropper() {
    // receiver 2 holds the only pad
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("leak.json");
    std::fs::write(
        &path,
        r#"{"p": 3, "K": 3, "qualified": [1], "L": 1, "Lw": 1, "Lx": 2,
            "layout": [{"subset": [1, 2], "width": 1}], "A": [[1], [1]], "B": [[1], [0]]}"#,
    )
    .unwrap();
    let out = sgc(&["verify", path.to_str().unwrap(), "--oracle"], &[]);
    assert_eq!(out.status.code(), Some(5));
    let rep = json(&out);
    assert_eq!(rep["leakage"][1]["receiver"], 3);
    assert_eq!(rep["leakage"][1]["symbols"], 1);
    assert_eq!(rep["failing_receivers"], serde_json::json!([2, 3]));
}

#[test]
fn oversized_oracle_is_skipped_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth_ex3(&dir);
    let out = sgc(
        &["verify", path.to_str().unwrap(), "--oracle"],
        &[("SGC_ORACLE_CAP", "16")],
    );
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["oracle"].is_null());
    assert!(v["oracle_skipped"].is_string());
    assert!(stderr(&out).contains("oracle skipped"));
}

#[test]
fn demos_run_and_are_deterministic() {
    for name in ["ex1", "ex2", "ex3", "ex4", "fig4", "region"] {
        let a = sgc(&["demo", name], &[]);
        assert!(a.status.success(), "{name}: {}", stderr(&a));
        let b = sgc(&["demo", name], &[]);
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
    let fig4 = String::from_utf8(sgc(&["demo", "fig4"], &[]).stdout).unwrap();
    assert!(fig4.contains("rate              5/3"));
    assert!(fig4.contains("bandwidth         10/3"));
    assert!(fig4.contains("leakage (symbols) 3:0 4:0 5:0"));
    let region = String::from_utf8(sgc(&["demo", "region"], &[]).stdout).unwrap();
    assert!(!region.contains("FAIL"));
}

#[test]
fn emitted_configs_match_the_shipped_files() {
    for name in ["ex1", "ex2", "ex3", "ex4", "fig4"] {
        let out = sgc(&["demo", name, "--emit-config"], &[]);
        let shipped = std::fs::read_to_string(config(&format!("{name}.json"))).unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), shipped, "{name}");
    }
    assert_eq!(sgc(&["demo", "region", "--emit-config"], &[]).status.code(), Some(2));
}
