use std::fs;
use std::process::{Command, Output};

fn unialg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unialg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(args: &[&str]) -> String {
    let o = unialg(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn z4_lattice_is_a_three_element_chain() {
    let out = ok(&["con", "lattice", "--alg", "z4aff.json"]);
    assert_eq!(out.lines().collect::<Vec<_>>(), ["|0|1|2|3|", "|0 2|1 3|", "|0 1 2 3|"]);
}

#[test]
fn algebra_files_are_read_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sq.json");
    let prod = ok(&["alg", "product", "--alg", "z2aff", "--alg", "z2aff"]);
    fs::write(&path, prod).unwrap();
    let out = ok(&["con", "lattice", "--alg", path.to_str().unwrap()]);
    // Subspaces of F₂²: zero, three lines, everything.
    assert_eq!(out.lines().count(), 5);
    let info = ok(&["alg", "info", "--alg", path.to_str().unwrap()]);
    assert!(info.contains("size 4"), "{info}");
}

#[test]
fn opt_of_the_semilattice_is_zero() {
    assert_eq!(ok(&["bridge", "opt", "--alg", "s2.json", "--rho", "|0|1|"]).trim(), "|0|1|");
    assert_eq!(ok(&["bridge", "opt", "--alg", "z2aff", "--rho", "|0|1|"]).trim(), "|0 1|");
}

#[test]
fn congruence_commands() {
    assert_eq!(ok(&["con", "cg", "--alg", "z4aff", "--pair", "0,2"]).trim(), "|0 2|1 3|");
    assert_eq!(ok(&["con", "cg", "--alg", "z4aff", "--pair", "0,1"]).trim(), "|0 1 2 3|");
    assert_eq!(ok(&["centralizer", "--alg", "s2", "--theta", "|0 1|"]).trim(), "|0|1|");
    assert_eq!(ok(&["abelian", "--alg", "z3aff", "--theta", "|0 1 2|"]).trim(), "yes");
    assert_eq!(ok(&["abelian", "--alg", "l2", "--theta", "|0 1|"]).trim(), "no");
    assert!(ok(&["con", "irreducible", "--alg", "z2aff", "--rho", "|0|1|"]).starts_with("irreducible"));
    assert_eq!(ok(&["con", "covplus", "--alg", "z2aff", "--rho", "|0|1|"]).lines().count(), 1);
}

#[test]
fn term_commands() {
    assert_eq!(ok(&["term", "check", "--alg", "z3aff", "--term", "(p x0 x1 x2)", "--predicate", "maltsev"]).trim(), "yes");
    assert_eq!(ok(&["term", "check", "--alg", "s2", "--term", "(p x0 x1 x2)", "--predicate", "maltsev"]).trim(), "no");
    assert!(ok(&["term", "search", "--alg", "s2", "--predicate", "wnu"]).contains("arity 2"));
}

#[test]
fn similarity_and_d() {
    assert!(ok(&["similar", "--alg", "z2aff", "--alg2", "z4aff"]).starts_with("similar"));
    assert_eq!(ok(&["similar", "--alg", "z2aff", "--alg2", "s2"]).trim(), "not similar");
    let d = ok(&["dalg", "--alg", "z4aff"]);
    assert!(d.contains("size 2"), "{d}");
    let z = ok(&["zeta", "--alg", "z3aff", "--rho", "|0|1|2|"]);
    // ζ ⊆ A × A × Z has one triple per pair of A.
    assert_eq!(z.lines().filter(|l| l.split(' ').count() == 3 && l.chars().all(|c| c.is_ascii_digit() || c == ' ')).count(), 9);
}

#[test]
fn bridge_files_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t.json");
    let g = dir.path().join("tt.json");
    let fs_ = f.to_str().unwrap();
    ok(&["bridge", "between", "--alg", "z4aff", "--rho", "|0|1|2|3|", "--alg2", "z2aff", "--sigma", "|0|1|", "--out", fs_]);
    let v = ok(&["bridge", "verify", "--file", fs_]);
    assert!(v.starts_with("bridge") && v.contains("good yes") && v.contains("b3 yes"), "{v}");

    ok(&["bridge", "opt", "--alg", "z4aff", "--rho", "|0|1|2|3|", "--out", g.to_str().unwrap()]);
    let composed = ok(&["bridge", "compose", "--file", g.to_str().unwrap(), "--file2", fs_]);
    assert!(composed.contains("\"algB\": \"Z2aff\""));

    let none = ok(&["bridge", "between", "--alg", "z2aff", "--rho", "|0|1|", "--alg2", "s2", "--sigma", "|0|1|", "--search"]);
    assert!(none.starts_with("no good bridge"));
}

#[test]
fn a_non_bridge_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(&f, r#"{"algA":"Z2aff","algB":"Z2aff","rho":"|0|1|","sigma":"|0|1|","quads":[[0,1,0,0]]}"#).unwrap();
    let o = unialg(&["bridge", "verify", "--file", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(unialg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(unialg(&["con", "lattice", "--alg", "no-such-algebra"]).status.code(), Some(2));
    assert_eq!(unialg(&["con", "cov", "--alg", "z4aff", "--rho", "|0 1|2 3|"]).status.code(), Some(2));
    assert_eq!(unialg(&["verify-paper", "--suite", "nosuch"]).status.code(), Some(2));
    assert_eq!(unialg(&["bridge", "verify", "--file", "/nonexistent/b.json"]).status.code(), Some(3));
}

#[test]
fn verify_paper_on_a_corpus_directory() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    fs::write(corpus.join("z2.json"), ok(&["alg", "quotient", "--alg", "z4aff", "--theta", "|0 2|1 3|"])).unwrap();
    fs::write(corpus.join("witnesses.json"), r#"{"Z4aff/|0 2|1 3|": {"maltsev": "(p x0 x1 x2)", "weak_difference": "(p x0 x1 x2)"}}"#).unwrap();
    let report = dir.path().join("r.json");
    let o = unialg(&["verify-paper", "--suite", "opt2", "--corpus", corpus.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let recs = v.as_array().unwrap();
    assert!(!recs.is_empty() && recs.iter().all(|r| r["status"] == "pass"), "{v}");
}

#[test]
fn verify_paper_all_builtin_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = unialg(&["verify-paper", "--suite", "all", "--corpus", "builtin", "--report", report.to_str().unwrap()]);
    let out = stdout(&o);
    print!("{out}");
    assert!(o.status.success(), "{out}\n{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(out.lines().filter(|l| l.contains(" pass, ")).count(), 19);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["status"] != "fail"));
}
