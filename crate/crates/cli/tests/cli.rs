//! End-to-end tests of the `cutseq` binary: every subcommand is exercised
//! against the committed fixtures, with exact expected output where the
//! result is a frozen table and substring checks where only the verdict
//! matters. Exit-code policy: 0 accept/consistent, 1 refuted, 2 usage or
//! malformed input.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_str()
        .expect("fixture path is valid UTF-8")
        .to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output { status, stdout, stderr } = Command::new(env!("CARGO_BIN_EXE_cutseq"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs");
    (
        status.code().expect("binary exits normally"),
        String::from_utf8(stdout).expect("stdout is UTF-8"),
        String::from_utf8(stderr).expect("stderr is UTF-8"),
    )
}

#[test]
fn gamma_m2_emits_the_full_edge_table() {
    let six = data("six.surface");
    let (code, out, _) = run(&["gamma", "--surface", &six, "--M", "2"]);
    assert_eq!(code, 0);
    let expected = "\
1 L\u{2192} 2 !
1 R\u{2192} 2 !
2 L\u{2192} 6 !
2 R\u{2192} 1 !
3 L\u{2192} 1 !
3 R\u{2192} 5 !
4 L\u{2192} 5
4 R\u{2192} 6
5 L\u{2192} 3
5 R\u{2192} 4
6 L\u{2192} 4 !
6 R\u{2192} 3 !
strongly connected: true
bad edges: (1,L) (1,R) (2,L) (2,R) (3,L) (3,R) (6,L) (6,R)
";
    assert_eq!(out, expected);
}

#[test]
fn gamma_rejects_m_at_or_past_the_modulus() {
    let six = data("six.surface");
    let (code, _, err) = run(&["gamma", "--surface", &six, "--M", "7"]);
    assert_eq!(code, 2);
    assert!(err.contains("out of range"), "stderr: {err}");
}

#[test]
fn decide_singular_start_exits_one() {
    let l = data("l.surface");
    let (code, out, _) = run(&[
        "decide",
        "--surface",
        &l,
        "--slope",
        "rat:211/500",
        "--start",
        "133/211,0",
        "--lambda0",
        "2",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("SINGULAR"), "stdout: {out}");
    assert!(out.contains("square 2, forward, after 2 crossings"), "stdout: {out}");
}

#[test]
fn decide_vertex_free_start_exits_zero() {
    let six = data("six.surface");
    let (code, out, _) = run(&[
        "decide",
        "--surface",
        &six,
        "--slope",
        "quad:-1/2,1/2,5",
        "--start",
        "1/7,1/11",
        "--lambda0",
        "1",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("CONSISTENT_WINDOW"), "stdout: {out}");
}

#[test]
fn validate_accepts_a_traced_window() {
    let six = data("six.surface");
    let (code, out, _) = run(&["validate", &data("window.seq"), "--surface", &six]);
    assert_eq!(code, 0);
    assert!(out.contains("kind: CONSISTENT_WINDOW"), "stdout: {out}");
}

#[test]
fn validate_rejects_a_corrupted_window() {
    let six = data("six.surface");
    let (code, out, _) = run(&["validate", &data("reject.seq"), "--surface", &six]);
    assert_eq!(code, 1);
    assert!(out.contains("kind: REJECT"), "stdout: {out}");
    assert!(out.contains("position: 4"), "stdout: {out}");
}

#[test]
fn validate_empty_file_is_a_usage_error() {
    let six = data("six.surface");
    let (code, out, err) = run(&["validate", &data("empty.seq"), "--surface", &six]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("empty"), "stderr: {err}");
}

#[test]
fn trace_reproduces_the_torus_fixture() {
    let torus = data("torus.surface");
    let (code, out, _) = run(&[
        "trace",
        "--surface",
        &torus,
        "--slope",
        "rat:211/500",
        "--start",
        "23/100,9/20",
        "--n",
        "10",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "1H 1V 1H 1H 1V 1H 1H 1H 1V 1H\noutcome: ran to length\n");
}

#[test]
fn trace_emit_segments_pins_the_singular_run() {
    let l = data("l.surface");
    let (code, out, _) = run(&[
        "trace",
        "--surface",
        &l,
        "--slope",
        "rat:211/500",
        "--start",
        "133/211,0",
        "--square",
        "2",
        "--n",
        "16",
        "--emit-segments",
    ]);
    assert_eq!(code, 0);
    let expected = "\
2V 3H 2H
outcome: singularity hit at square 2
segment 2 from rat:133/211 rat:0/1 to rat:1/1 rat:39/250
segment 3 from rat:0/1 rat:39/250 to rat:1/1 rat:289/500
segment 2 from rat:0/1 rat:289/500 to rat:1/1 rat:1/1
";
    assert_eq!(out, expected);
}

#[test]
fn surface_check_classifies_squares() {
    let (code, out, _) = run(&["surface", "check", &data("six.surface")]);
    assert_eq!(code, 0);
    assert!(out.contains("cycle modulus: 6"), "stdout: {out}");
    assert!(out.contains("good squares: 3 5"), "stdout: {out}");
    assert!(out.contains("bad squares: 1 2 4 6"), "stdout: {out}");
    assert!(out.contains("labels determine edges: true"), "stdout: {out}");
}

#[test]
fn surface_check_rejects_a_missing_file() {
    let (code, _, err) = run(&["surface", "check", &data("no-such-file.surface")]);
    assert_eq!(code, 2);
    assert!(err.contains("no-such-file.surface"), "stderr: {err}");
}

#[test]
fn lift_reproduces_the_traced_labels() {
    let six = data("six.surface");
    let (code, out, _) = run(&[
        "lift",
        "--surface",
        &six,
        "--eps",
        "VHVHHVHVHH",
        "--lambda0",
        "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "1V 1H 2V 3H 4H 6V 5H 3V 4H 2H\n");
}

#[test]
fn derive_full_runs_to_the_terminal_stage() {
    let (code, out, _) = run(&[
        "derive",
        "HVHHVHHHVHHVHHHVH",
        "--full",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "{\"stages\":[\"VHVHHVHVHHV\",\"VVHVVHV\",\"HVH\"]}\n");
}

#[test]
fn derive_refuses_an_underivable_word() {
    let (code, _, err) = run(&["derive", "HV"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn symmetry_classifies_an_even_window() {
    let (code, out, _) = run(&["symmetry", "HVH|HVH"]);
    assert_eq!(code, 0);
    assert_eq!(out, "kind: even\ncenter: 0\nverified pairs: 3\n");
}

#[test]
fn iet_dump_lists_the_conjugated_exchange() {
    let six = data("six.surface");
    let (code, out, _) = run(&["iet", "--surface", &six, "--slope", "quad:-1/2,1/2,5"]);
    assert_eq!(code, 0);
    assert!(
        out.contains("alphabet: 1L 1R 2L 2R 3L 3R 4L 4R 5L 5R 6L 6R"),
        "stdout: {out}"
    );
    assert!(out.contains("total: rat:6/1"), "stdout: {out}");
    assert!(out.contains("irreducible: true"), "stdout: {out}");
}

#[test]
fn iet_cylinder_reports_intervals_and_emptiness() {
    let six = data("six.surface");
    let (code, out, _) = run(&[
        "iet",
        "--surface",
        &six,
        "--slope",
        "quad:-1/2,1/2,5",
        "--cylinder",
        "1L",
    ]);
    assert_eq!(code, 0);
    assert!(
        out.contains("cylinder (1,L): [rat:0/1, quad:3/2,-1/2,5) length quad:3/2,-1/2,5"),
        "stdout: {out}"
    );

    let (code, out, _) = run(&[
        "iet",
        "--surface",
        &six,
        "--slope",
        "quad:-1/2,1/2,5",
        "--cylinder",
        "(2,L) (6,L)",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("cylinder (2,L) (6,L): empty"), "stdout: {out}");
}

#[test]
fn json_output_is_deterministic_and_plain_ascii_safe() {
    let six = data("six.surface");
    let args = ["gamma", "--surface", &six, "--M", "2", "--format", "json"];
    let (code_a, out_a, _) = run(&args);
    let (code_b, out_b, _) = run(&args);
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    assert_eq!(out_a, out_b);
    assert!(out_a.starts_with('{'), "stdout: {out_a}");
    assert!(out_a.contains("\"strongly_connected\":true"), "stdout: {out_a}");
    assert!(!out_a.contains('\u{1b}'), "stdout has escape bytes");
}

#[test]
fn unknown_arguments_are_usage_errors() {
    let six = data("six.surface");
    let (code, _, _) = run(&["gamma", "--surface", &six, "--M", "2", "--frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&[]);
    assert_eq!(code, 2);
}
