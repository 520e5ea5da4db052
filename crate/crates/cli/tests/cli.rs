use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flipforge")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["flipdist", "--nope"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(2));
    fs::write(dir.path().join("s.txt"), "yrsa 1 2\n1 1\n").unwrap();
    let out = run(dir.path(), &["reduce", "--in", "s.txt", "--beta", "4", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["rsa", "solve", "--in", "missing.txt"]).status.code(), Some(1));
    fs::write(dir.path().join("s.txt"), "yrsa 2 3\n1 1\n2 1\n").unwrap();
    assert_eq!(run(dir.path(), &["reduce", "--in", "s.txt", "--out", "x"]).status.code(), Some(1));
    fs::write(dir.path().join("bad.txt"), "rsa 1\n0 0 1 1\n").unwrap();
    assert_eq!(run(dir.path(), &["render", "--in", "bad.txt", "--out", "b.svg"]).status.code(), Some(1));
}

#[test]
fn double_chain_flip_distance() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["dc", "gen", "--n", "4", "--with-apex", "--out", "dc"]);
    let out = ok(p, &["flipdist", "--polygon", "dc/polygon.txt", "--a", "dc/tu.txt", "--b", "dc/tl.txt", "--out", "w.txt"]);
    assert_eq!(out.lines().next(), Some("distance 9"));
    let v = ok(p, &["verify", "w.txt", "--start", "dc/tu.txt"]);
    assert!(v.contains("violations 0"));
    let out = ok(p, &["flipdist", "--polygon", "dc/polygon.txt", "--a", "dc/tu.txt", "--b", "dc/tl.txt", "--max-depth", "3"]);
    assert!(out.starts_with("budget exceeded"));
    let capped = Command::new(env!("CARGO_BIN_EXE_flipforge"))
        .current_dir(p)
        .env("FLIPFORGE_MAX_STATES", "2")
        .args(["flipdist", "--polygon", "dc/polygon.txt", "--a", "dc/tu.txt", "--b", "dc/tl.txt"])
        .output()
        .unwrap();
    assert!(String::from_utf8(capped.stdout).unwrap().starts_with("budget exceeded"));
}

#[test]
fn solve_reduce_convert_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("s.txt"), "# two sinks\nyrsa 2 5\n1 2\n3 1\n").unwrap();
    let out = ok(p, &["rsa", "solve", "--in", "s.txt", "--out", "tree.txt"]);
    assert!(out.contains("length 5"));
    ok(p, &["reduce", "--in", "s.txt", "--beta", "2", "--d", "12", "--override", "--out", "inst"]);
    let manifest = fs::read_to_string(p.join("inst/manifest.json")).unwrap();
    assert!(manifest.contains("\"provenance\": \"override\""));
    let out = ok(p, &["convert", "rsa-to-flips", "--instance", "inst", "--in", "tree.txt", "--out", "f.txt"]);
    assert!(out.contains("ends at T2 yes"));
    let out = ok(p, &["convert", "flips-to-rsa", "--instance", "inst", "--in", "f.txt", "--out", "back.txt", "--trace", "tr.txt"]);
    assert!(out.contains("arborescence length 5") && out.contains("within k yes"));
    for args in [
        vec!["verify", "inst"],
        vec!["verify", "inst/t1.txt"],
        vec!["verify", "inst/polygon.txt"],
        vec!["verify", "f.txt", "--instance", "inst"],
        vec!["verify", "back.txt", "--sinks", "s.txt"],
        vec!["verify", "tree.txt", "--sinks", "s.txt"],
        vec!["verify", "tr.txt"],
        vec!["verify", "s.txt"],
    ] {
        assert!(ok(p, &args).contains("violations 0"), "{args:?}");
    }
}

#[test]
fn tampered_instance_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("s.txt"), "yrsa 1 2\n1 1\n").unwrap();
    ok(p, &["reduce", "--in", "s.txt", "--out", "inst"]);
    let t1 = fs::read_to_string(p.join("inst/t1.txt")).unwrap();
    fs::write(p.join("inst/t1.txt"), t1 + "# edited\n").unwrap();
    assert_eq!(run(p, &["verify", "inst"]).status.code(), Some(1));
}

#[test]
fn perturb_and_seeded_random_trees() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("s.txt"), "yrsa 2 3\n1 1\n2 1\n").unwrap();
    assert!(ok(p, &["rsa", "perturb", "--in", "s.txt", "--out", "y.txt"]).contains("k 56"));
    assert!(ok(p, &["verify", "y.txt"]).contains("yrsa yes"));
    ok(p, &["rsa", "random", "--in", "s.txt", "--seed", "7", "--out", "a.txt"]);
    ok(p, &["rsa", "random", "--in", "s.txt", "--seed", "7", "--out", "b.txt"]);
    assert_eq!(fs::read(p.join("a.txt")).unwrap(), fs::read(p.join("b.txt")).unwrap());
    assert!(ok(p, &["verify", "a.txt", "--sinks", "s.txt"]).contains("violations 0"));
}

#[test]
fn rendering_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["dc", "gen", "--n", "3", "--out", "dc"]);
    ok(p, &["render", "--in", "dc/tu.txt", "--out", "a.svg"]);
    ok(p, &["render", "--in", "dc/tu.txt", "--out", "b.svg"]);
    let a = fs::read_to_string(p.join("a.svg")).unwrap();
    assert_eq!(a, fs::read_to_string(p.join("b.svg")).unwrap());
    assert_eq!(a.matches("class=\"diagonal\"").count(), 3);
}
