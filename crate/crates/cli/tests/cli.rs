use std::path::PathBuf;
use std::process::{Command, Output};

const PHI: &str = "(1+sqrt(5))/2";

fn ostdigits(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ostdigits")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = ostdigits(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn built(preset: &str, dir: &tempfile::TempDir) -> String {
    let path = dir.path().join(format!("{preset}.txt")).display().to_string();
    stdout(&["build", "--preset", preset, "-o", &path]);
    path
}

#[test]
fn digits_of_phi() {
    assert_eq!(stdout(&["digits", PHI, "2", "16"]).trim(), "1.1001111000110111");
    assert_eq!(stdout(&["digits", PHI, "3", "16"]).trim(), "1.1212001122021210");
    assert_eq!(stdout(&["digits", PHI, "10", "5"]).trim(), "1.61803");
}

#[test]
fn automaton_digits_agree_with_the_oracle() {
    for (alpha, base) in [(PHI, "2"), (PHI, "10"), ("sqrt(2)", "3"), ("(sqrt(3)-1)/2", "2")] {
        let direct = stdout(&["digits", alpha, base, "300"]);
        let via = stdout(&["digits", alpha, base, "300", "--via-automaton"]);
        assert_eq!(direct, via, "{alpha} base {base}");
    }
}

#[test]
fn build_reports_state_counts() {
    for (preset, n) in [("phi-b2", 8), ("phi-b10", 97), ("sqrt2-b2", 6)] {
        let out = ostdigits(&["build", "--preset", preset]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains(&format!("states: {n} start: 0")), "{preset}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with(&format!("{n} states")));
    }
}

#[test]
fn build_rejects_a_mismatched_system() {
    let out = ostdigits(&["build", "--alpha", PHI, "--base", "2", "--system", "pell"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_follows_representations() {
    let dir = tempfile::tempdir().unwrap();
    let a = built("phi-b2", &dir);
    assert_eq!(stdout(&["run", &a, "100100"]).trim(), "1");
    assert_eq!(stdout(&["run", &a, "0100100"]).trim(), "1");
    let bad = ostdigits(&["run", &a, "110"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("invalid representation"));
}

#[test]
fn encode_and_decode_are_inverse() {
    for n in [0u32, 1, 7, 100, 12345] {
        for sys in ["fib", "pell", "ost:[2,1]"] {
            let rep = stdout(&["encode", &n.to_string(), "--system", sys]);
            assert_eq!(stdout(&["decode", rep.trim(), "--system", sys]).trim(), n.to_string(), "{sys}");
        }
    }
    assert_eq!(stdout(&["encode", "100", "--system", "fib"]).trim(), "1000010100");
}

#[test]
fn verify_passes_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let a = built("phi-b2", &dir);
    assert_eq!(stdout(&["verify", &a, "--preset", "phi-b2", "--n-max", "2000"]).trim(), "pass: 2000 digits");
    let corrupted = dir.path().join("bad.txt");
    let text = std::fs::read_to_string(&a).unwrap().replacen("state 7 output 1", "state 7 output 0", 1);
    std::fs::write(&corrupted, text).unwrap();
    let out = ostdigits(&["verify", corrupted.to_str().unwrap(), "--preset", "phi-b2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("fail at n = "));
}

#[test]
fn reference_base_ten_table_verifies() {
    let out = stdout(&["verify", &fixture("phi_b10.txt"), "--preset", "phi-b10", "--n-max", "300"]);
    assert_eq!(out.trim(), "pass: 300 digits");
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let a = built("phi-b2", &dir);
    let dot = stdout(&["export-dot", &a]);
    assert!(dot.starts_with("digraph {"));
    assert_eq!(dot.lines().filter(|l| l.contains("[label=\"") && !l.contains("->")).count(), 8);
    let base = stdout(&["export-dot", "--base-dfa", "ost:[2,1]"]);
    assert!(base.contains("label=\"B4/0\""));
}

#[test]
fn satmin_single_cell() {
    let out = stdout(&["satmin", "--preset", "sqrt2-b2", "--k", "6", "--digits", "29", "--enumerate"]);
    assert!(out.contains("| 6 | 29 | SAT, verified | 1 of 9 |"), "{out}");
    let out = stdout(&["satmin", "--preset", "sqrt2-b2", "--k", "5", "--digits", "29"]);
    assert!(out.contains("| 5 | 29 | UNSAT | - |"), "{out}");
    let out = stdout(&["satmin", "--preset", "sqrt2-b2", "--k", "6", "--digits", "29", "--enumerate", "--refine"]);
    assert!(out.contains("| 6 | 29 | SAT, verified | 1 of "), "{out}");
    assert!(out.contains(" digits added |"), "{out}");
}

#[test]
fn satmin_writes_reproducible_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let cnf = dir.path().join(format!("{tag}.cnf"));
        let dict = dir.path().join(format!("{tag}.dict"));
        stdout(&[
            "satmin", "--preset", "phi-b2", "--k", "4", "--digits", "20",
            "--cnf-out", cnf.to_str().unwrap(), "--dict-out", dict.to_str().unwrap(),
        ]);
        (std::fs::read(cnf).unwrap(), std::fs::read(dict).unwrap())
    };
    let first = run("a");
    assert!(!first.0.is_empty() && !first.1.is_empty());
    assert_eq!(first, run("b"));
}

#[test]
fn presets_list_every_configuration() {
    let out = stdout(&["presets"]);
    for name in ["phi-b2", "phi-b10", "sqrt2-b3", "bronze-b3", "sqrt17m3-b2"] {
        assert!(out.contains(name), "{name}");
    }
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(ostdigits(&["digits", PHI]).status.code(), Some(1));
    assert_eq!(ostdigits(&["build", "--preset", "no-such"]).status.code(), Some(1));
    assert_eq!(ostdigits(&["decode", "11", "--system", "fib"]).status.code(), Some(1));
}
