use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn progs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_progs")).args(args).output().expect("binary runs")
}

fn validate(shapes: &str, flags: &[&str]) -> Output {
    let graph = fixture("g_office.json");
    let shapes = fixture(shapes);
    let mut args = vec!["validate", graph.to_str().unwrap(), shapes.to_str().unwrap()];
    args.extend_from_slice(flags);
    progs(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn s2_conforms_with_witness() {
    let out = validate("s2.progs", &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "s2(102) = yes"), "{text}");
}

#[test]
fn person_shape_fails_at_102() {
    let out = validate("person-shape.progs", &["--explain"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("PersonShape(102)"), "{text}");
    assert!(!text.contains("PersonShape(100)"), "{text}");
}

#[test]
fn oracle_gives_the_same_verdicts() {
    for shapes in ["s1.progs", "s2.progs", "person-shape.progs", "s3.progs", "cycles.progs"] {
        let fast = validate(shapes, &[]).status.code();
        let oracle = validate(shapes, &["--oracle"]).status.code();
        let normalized = validate(shapes, &["--normalize"]).status.code();
        assert_eq!(fast, oracle, "{shapes}");
        assert_eq!(fast, normalized, "{shapes}");
    }
}

#[test]
fn json_report() {
    let out = validate("s2.progs", &["--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["conforms"], true);
    assert_eq!(doc["witness"]["s2(102)"], "yes");
    assert_eq!(doc["targets"][0]["status"], "satisfied");
}

#[test]
fn all_lists_every_assignment() {
    let out = validate("cycles.progs", &["--all"]);
    assert_eq!(out.status.code(), Some(0));
    // self(100) is fixed by its target; self(101) and self(102) are free.
    assert!(stdout(&out).contains("9 faithful assignments"));
}

#[test]
fn atom_limit_exits_3() {
    let out = validate("s1.progs", &["--normalize", "--oracle"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn check_reports_counts() {
    let out = progs(&["check", fixture("s1-lowercase.progs").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "1 shape, 0 cycles");

    let out = progs(&["check", fixture("cycles.progs").to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), "3 shapes, 2 cycles");

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.progs");
    std::fs::write(&empty, "").unwrap();
    let out = progs(&["check", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("0 shapes"));
}

#[test]
fn check_unknown_reference_exits_2() {
    let out = progs(&["check", fixture("unknown-ref.progs").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown-ref.progs:2:25"), "{err}");
}

#[test]
fn export_asp_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.lp");
    let out = progs(&[
        "export-asp",
        fixture("g_office.json").to_str().unwrap(),
        fixture("s1.progs").to_str().unwrap(),
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(written, std::fs::read_to_string(fixture("g_office_s1.lp")).unwrap());
}

#[test]
fn export_asp_empty_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    let shapes = dir.path().join("s.progs");
    let out_path = dir.path().join("out.lp");
    std::fs::write(&graph, r#"{"nodes":[],"relationships":[]}"#).unwrap();
    std::fs::write(&shapes, "").unwrap();
    let out = progs(&["export-asp", graph.to_str().unwrap(), shapes.to_str().unwrap(), out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), "");
}

#[test]
fn export_asp_unwritable_target_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("missing-dir").join("out.lp");
    let out = progs(&[
        "export-asp",
        fixture("g_office.json").to_str().unwrap(),
        fixture("s1.progs").to_str().unwrap(),
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn convert_to_canonical_json() {
    let out = progs(&["convert", fixture("g_office.json").to_str().unwrap(), "-"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, std::fs::read(fixture("g_office.canonical.json")).unwrap());
}

#[test]
fn convert_to_asp_without_shapes() {
    let out = progs(&["convert", fixture("g_office.json").to_str().unwrap(), "-", "--to", "asp"]);
    let text = stdout(&out);
    assert!(text.contains("edge(102, 203, 101)."));
    assert!(!text.contains("nodeshape"));
}

#[test]
fn missing_input_and_bad_usage_exit_2() {
    let out = progs(&["validate", "/no/such/graph.json", fixture("s1.progs").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(progs(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(progs(&[]).status.code(), Some(2));
}
