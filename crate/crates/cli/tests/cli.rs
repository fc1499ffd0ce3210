use std::process::{Command, Output};

use serde_json::Value;

fn anuca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anuca"))
        .args(args)
        .env_remove("ANUCA_CAP")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON report")
}

#[test]
fn inverse_of_ex3_has_three_cell_memory() {
    let out = anuca(&["inverse", "--rules", "builtin:ex3_s", "--max-radius", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "report_v1");
    assert_eq!(r["result"]["kind"], "inverse-synthesized");
    assert_eq!(r["result"]["memory"]["cells"], serde_json::json!([[-1], [0], [1]]));
}

#[test]
fn inverse_is_written_and_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.json");
    let p = path.to_str().unwrap();
    let out = anuca(&["inverse", "--rules", "builtin:ex3_s", "--output", p]);
    assert_eq!(out.status.code(), Some(0));
    // composing the inverse after s is the identity on any box
    let comp = dir.path().join("c.json");
    let c = comp.to_str().unwrap();
    let out = anuca(&["compose", "--rules", p, "--with", "builtin:ex3_s", "--output", c]);
    assert_eq!(out.status.code(), Some(0));
    let out = anuca(&["simulate", "--rules", c, "--window", "-4..4", "--input", "011010011", "--boundary", "fixed"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["steps"][1], "011010011");
}

#[test]
fn ex1_is_not_stably_injective() {
    let out = anuca(&["stable-injectivity", "--rules", "builtin:ex1_s", "--max-radius", "4", "--verify"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["result"]["verdict"], "refuted");
    assert_eq!(r["verification"]["ok"], true);
}

#[test]
fn shift_moves_left_on_a_torus() {
    let out = anuca(&["simulate", "--rules", "builtin:shift", "--window", "0..4", "--input", "00100", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let steps = report(&out)["result"]["steps"].clone();
    assert_eq!(steps, serde_json::json!(["00100", "01000", "10000", "00001"]));
}

#[test]
fn image_counts_ex3_patterns() {
    let out = anuca(&["image", "--rules", "builtin:ex3_s", "--window", "-4..4"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["result"]["size"], 128);
    assert_eq!(r["result"]["universe_size"], 512);
}

#[test]
fn refutations_exit_one_and_replay() {
    for args in [
        &["collisions", "--rules", "builtin:majority3", "--max-radius", "2", "--verify"][..],
        &["surjectivity", "--rules", "builtin:ex1_s", "--verify"],
        &["psi-check", "--rules", "builtin:xor2", "--box", "0..2", "--verify"],
        &["post-surjectivity", "--rules", "builtin:xor2", "--lift-radius", "2", "--verify"],
    ] {
        let out = anuca(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert_eq!(report(&out)["verification"]["ok"], true, "{args:?}");
    }
}

#[test]
fn wrap_check_with_offsets() {
    let out = anuca(&["wrap-check", "--rules", "builtin:ex3_s", "--box", "-3..3", "--offsets", "-1;0;1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["compatible"], false);
    let out = anuca(&["wrap-check", "--rules", "builtin:shift", "--box", "-3..3"]);
    assert_eq!(report(&out)["result"]["compatible"], true);
}

#[test]
fn uniform_lift_radii() {
    for (name, radius) in [("shift", 1), ("identity", 0)] {
        let rules = format!("builtin:{name}");
        let out = anuca(&["post-surjectivity", "--rules", &rules, "--uniform"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(report(&out)["result"]["radius"], radius);
    }
}

#[test]
fn determining_radius_of_ex2() {
    let out = anuca(&["determining-radius", "--rules", "builtin:ex2_s", "--cell", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["radius"], 3);
}

#[test]
fn bad_rule_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"version": 1, "dim": 1}"#).unwrap();
    let out = anuca(&["collisions", "--rules", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let out = anuca(&["collisions", "--rules", "builtin:nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = anuca(&["simulate", "--rules", "builtin:shift", "--window", "0..2", "--input", "0120"]);
    assert_eq!(out.status.code(), Some(2));
    let out = anuca(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cap_overruns_exit_two() {
    let out = anuca(&["--cap", "16", "image", "--rules", "builtin:ex3_s", "--window", "-4..4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn threads_do_not_change_reports() {
    let a = anuca(&["--threads", "1", "collisions", "--rules", "builtin:ex1_s", "--max-radius", "4"]);
    let b = anuca(&["collisions", "--rules", "builtin:ex1_s", "--max-radius", "4", "--threads", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn timing_is_opt_in() {
    let out = anuca(&["surjectivity", "--rules", "builtin:shift", "--max-radius", "1"]);
    assert!(report(&out).get("wall_time_ms").is_none());
    let out = anuca(&["--timing", "surjectivity", "--rules", "builtin:shift", "--max-radius", "1"]);
    assert!(report(&out)["wall_time_ms"].is_u64());
}
