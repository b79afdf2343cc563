use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

const W25: &str = "5^2; 5; 1,2,6; 10,2,14\n";

fn quadfib(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadfib")).args(args).env("QFIB_WORKERS", "1").output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("quadfib-cli-tests-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn strict_search_over_f7_is_exhausted() {
    let o = quadfib(&["search-config", "--field", "7^1", "--policy", "exhaustive"]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["exhausted"], true);
    assert_eq!(v["tried"], "15625");
}

#[test]
fn betti_check_reads_b2_of_y() {
    let w = scratch("w25.txt");
    fs::write(&w, W25).unwrap();
    let o = quadfib(&["betti-check", "--space", "Y", "--witness", w.to_str().unwrap(), "--ext", "1..3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["verdict"], "pass");
    for row in v["b2"].as_array().unwrap() {
        assert_eq!(row[1], "2");
    }
}

#[test]
fn invalid_witness_fails_at_the_admissibility_row() {
    let w = scratch("bad.txt");
    fs::write(&w, "5^2; 5; 1,2,0; 10,2,14\n").unwrap();
    let o = quadfib(&["verify-all", "--witness", w.to_str().unwrap(), "--only", "A6"]);
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("W    FAIL"));
}

#[test]
fn input_and_budget_errors_have_their_own_codes() {
    assert_eq!(quadfib(&["quad-count", "--field", "6^1", "--diag", "1,1"]).status.code(), Some(2));
    let missing = scratch("missing.txt");
    assert_eq!(quadfib(&["residues", "--witness", missing.to_str().unwrap()]).status.code(), Some(2));
    let o = quadfib(&["--budget", "100", "quad-count", "--field", "5^1", "--diag", "1,1,1,1,1", "--brute"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_all_reports_are_reproducible() {
    let (a, b, c) = (scratch("a.json"), scratch("b.json"), scratch("a.csv"));
    for out in [&a, &b] {
        let o = quadfib(&["verify-all", "--only", "A6,A9", "--out", out.to_str().unwrap(), "--csv", c.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let csv = fs::read_to_string(&c).unwrap();
    assert!(csv.starts_with("id,verdict,claim,inputs,observed,expected"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("A")).count(), 2);
}
