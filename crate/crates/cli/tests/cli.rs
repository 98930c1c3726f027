//! Command-line contract: exit codes, schema versioning, stable dumps.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perfhopf"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "witt", "--p", "9"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "hopf", "--maxdeg", "17"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "hopf", "--depth", "5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "hopf", "--witt", "5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "witt", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(run(&["endos", "--p", "5"]).status.code(), Some(2));
    assert_eq!(run(&["dump", "module", "no_such_module"]).status.code(), Some(2));
    assert_eq!(
        run(&["cohomology", "a1", "--module", "uWF", "--weights"]).status.code(),
        Some(2)
    );
}

#[test]
fn passing_suites_exit_zero_with_schema() {
    let out = run(&["verify", "witt", "--p", "2", "--witt", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["failed"], 0);
    assert!(v["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .any(|a| a["id"] == "witt-level-one-shape-p2"));
}

#[test]
fn twisted_module_dump_shows_the_presentation() {
    let out = run(&["dump", "module", "twisted", "--p", "2", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("x perfect-tower 1/2 0"));
    assert!(text.contains("relation: x -> 0"));
    assert!(text.contains("comult: x1 -> x0*x0' + x1 + x1'"));
    assert!(text.contains("augmentation: x^(1/4) -> x^(1/2)"));
}

#[test]
fn identity_module_dump_is_a_free_tower() {
    let out = run(&["dump", "module", "identity", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("x perfect-tower 1 0"));
    assert!(!text.contains("relation:"));
}

#[test]
fn dumps_are_byte_stable() {
    let a = run(&["dump", "cech-complex", "--module", "twisted", "--p", "2"]);
    let b = run(&["dump", "cech-complex", "--module", "twisted", "--p", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["dump", "witt-polys", "--p", "3", "--witt", "2"]);
    let d = run(&["dump", "witt-polys", "--p", "3", "--witt", "2"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn cohomology_json_has_tables() {
    let out = run(&[
        "cohomology", "a1", "--module", "twisted", "--p", "2", "--depth", "2", "--witt", "2",
        "--maxdeg", "3", "--weights",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["module"], "twisted");
    let tables = v["tables"].as_array().unwrap();
    let h1_deg1: Vec<&serde_json::Value> = tables
        .iter()
        .filter(|t| t["i"] == 1 && t["degree"] == "1" && t["dim"] == 1)
        .collect();
    assert_eq!(h1_deg1.len(), 1);
    assert_eq!(h1_deg1[0]["weight"], 1);
    assert_eq!(h1_deg1[0]["representatives"][0], "y0");
    assert!(v["flags"].as_array().unwrap().is_empty());
}

#[test]
fn sections_dump_uses_the_pair_language() {
    let out = run(&[
        "dump", "sections", "--module", "uWF", "--pair", "perf(x,y) kill(y)", "--format", "text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("block x (free-tower)"));
    assert!(text.contains("block y (module-copy)"));
    assert!(text.contains("relation: y -> y0"));
    // ill-formed pairs are usage errors
    let bad = run(&["dump", "sections", "--module", "uWF", "--pair", "perf(x) kill(z)"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn witt_cache_is_honored() {
    let dir = std::env::temp_dir().join("perfhopf-cache-test");
    let _ = std::fs::remove_dir_all(&dir);
    let run_cached = || {
        Command::new(env!("CARGO_BIN_EXE_perfhopf"))
            .env("PERFHOPF_CACHE", &dir)
            .args(["dump", "witt-polys", "--p", "3", "--witt", "2"])
            .output()
            .expect("binary runs")
    };
    let first = run_cached();
    assert_eq!(first.status.code(), Some(0));
    assert!(dir.join("witt_p3_n2.txt").exists());
    let second = run_cached();
    assert_eq!(first.stdout, second.stdout);
    let _ = std::fs::remove_dir_all(&dir);
}
