//! End-to-end tests driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

fn theta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn export_into(dir: &Path) {
    let out = theta(&["export", "--format", "json", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "export failed: {}", stdout(&out));
}

#[test]
fn hom_counts_match_the_frozen_values() {
    for (src, dst, expect) in [
        ("[1]([0])", "[1]([0])", "3"),
        ("[1]([1](.))", "[1]([1](.))", "5"),
        ("[1]([1](.))", "[2]([1](.),[1](.))", "18"),
    ] {
        let out = theta(&["hom", "--level", "2", "--src", src, "--dst", dst, "--count"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out).trim(), expect, "{src} -> {dst}");
    }
}

#[test]
fn hom_list_prints_one_json_line_per_morphism() {
    let out = theta(&["hom", "--level", "2", "--src", "[1]([0])", "--dst", "[1]([0])", "--list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    for line in lines {
        serde_json::from_str::<serde_json::Value>(line).expect("valid json line");
    }
}

#[test]
fn objects_lists_the_window_in_canonical_order() {
    let out = theta(&["objects", "--level", "2", "--max-size", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "[0]\n[1]([0])\n[1]([1](.))\n[2]([0],[0])\n");
}

#[test]
fn export_is_byte_identical_across_runs() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    export_into(d1.path());
    export_into(d2.path());
    for name in ["spine2.json", "boundary2.json", "chaotic2.json"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} drifted between runs");
    }
}

#[test]
fn segal_check_fails_on_the_spine_with_its_witness() {
    let dir = tempfile::tempdir().unwrap();
    export_into(dir.path());
    let input = dir.path().join("spine2.json");
    let out = theta(&["check", "segal", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("fail at [2](.,.): 7 vs 8"), "{text}");
    assert!(text.ends_with("segal: fail\n"), "{text}");
}

#[test]
fn segal_check_fails_on_the_boundary_with_its_witness() {
    let dir = tempfile::tempdir().unwrap();
    export_into(dir.path());
    let input = dir.path().join("boundary2.json");
    let out = theta(&["check", "segal", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("fail at [2](.,.): 9 vs 10"), "{}", stdout(&out));
}

#[test]
fn dnerve_feeds_the_checkers() {
    let dir = tempfile::tempdir().unwrap();
    export_into(dir.path());
    let ncat = dir.path().join("chaotic2.json");
    let out = theta(&["dnerve", "--input", ncat.to_str().unwrap(), "--window", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let nerve = dir.path().join("nerve.json");
    std::fs::write(&nerve, stdout(&out)).unwrap();
    let nerve = nerve.to_str().unwrap();

    let seg = theta(&["check", "segal", "--input", nerve]);
    assert_eq!(seg.status.code(), Some(0));

    let comp = theta(&["check", "complete", "--input", nerve]);
    assert_eq!(comp.status.code(), Some(1));
    assert!(stdout(&comp).contains("level 1: cells 2 vs equivalences 4"), "{}", stdout(&comp));

    let grp = theta(&["check", "groupoid", "--input", nerve]);
    assert_eq!(grp.status.code(), Some(0));
    assert!(stdout(&grp).contains("constant: no"), "{}", stdout(&grp));
}

#[test]
fn truncation_check_reports_fibers() {
    let dir = tempfile::tempdir().unwrap();
    export_into(dir.path());
    let input = dir.path().join("boundary2.json");
    let out = theta(&["check", "truncation", "--input", input.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("truncation at 1: pass"), "{}", stdout(&out));
}

#[test]
fn qposet_homology_is_trivial_for_the_unit_square() {
    let out = theta(&["qposet", "--m", "1", "--n", "1", "--homology"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "paths: 3\nH_0: 0\nH_1: 0\nreduced homology trivial: yes\n");
}

#[test]
fn qposet_retractions_reach_an_acyclic_stage() {
    let out = theta(&["qposet", "--m", "2", "--n", "2", "--retractions"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("paths: 13\n"), "{text}");
    assert!(text.contains("stage 0: 13 -> 13"), "{text}");
    assert!(text.ends_with("final size 8, acyclic: pass\n"), "{text}");
}

#[test]
fn verify_runs_a_manifest_trimmed_suite() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.json");
    std::fs::write(&manifest, r#"{"windows":{"level2":2,"level3":2}}"#).unwrap();
    let out = theta(&["verify", "axioms", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "suite axioms: 33 cases, 33 passed\n");
}

#[test]
fn verify_stdout_is_deterministic() {
    let a = theta(&["verify", "covers"]);
    let b = theta(&["verify", "covers"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn object_grammar_errors_exit_two_with_a_position() {
    let out = theta(&["hom", "--level", "2", "--src", "bad(", "--dst", "[0]", "--count"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("byte 0"), "{err}");
}

#[test]
fn missing_input_files_exit_two() {
    let out = theta(&["check", "segal", "--input", "/nonexistent/x.json"]);
    assert_eq!(out.status.code(), Some(2));
}
