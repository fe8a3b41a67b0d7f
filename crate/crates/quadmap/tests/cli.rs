//! Black-box tests of the installed binary: golden output bytes, byte-level
//! determinism across runs, and the exit-code contract.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadmap"))
        .args(args)
        .output()
        .expect("binary must run")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("stderr is UTF-8")
}

#[test]
fn sunit_solve_golden_bytes() {
    let out = run(&["sunit-solve", "--S", "2", "--bound", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "{\"S\":[2],\"bound\":4,\"solutions\":[[\"-1\",\"2\"],[\"1/2\",\"1/2\"],[\"2\",\"-1\"]],\"u_values\":[\"-1\",\"1/2\",\"2\"]}\n"
    );
    assert!(out.stderr.is_empty());
}

#[test]
fn density_witness_golden_bytes() {
    let out = run(&["density-witness", "--p", "2", "--N", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("{\"p\":2,\"N\":5,\"sigma1\":\"8186\",\"rows\":[{\"n\":0,"));
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn invariants_golden_bytes() {
    let out = run(&["invariants", "--map", "1,0,1;3,0,4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "{\"sigma1\":\"26\",\"sigma2\":\"832\",\"sigma3\":\"24\",\"resultant\":\"1\"}\n"
    );
}

#[test]
fn identical_argv_produces_identical_bytes() {
    for args in [
        &["sunit-solve", "--S", "2,3", "--bound", "6"] as &[&str],
        &["covering-check", "--S", "2", "--coeff-bound", "2", "--eq-bound", "4"],
        &["density-witness", "--p", "3", "--N", "3"],
        &["family", "--kind", "cpnf", "--p", "2", "--N", "4"],
        &["classify-fixed", "--map", "1,1,0;0,2,1", "--p1", "1:0", "--p2", "0:1", "--prime", "3"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(a.stdout, b.stdout, "stdout differs for {args:?}");
        assert_eq!(a.stderr, b.stderr, "stderr differs for {args:?}");
    }
}

#[test]
fn exit_code_contract() {
    // 0: success.
    let out = run(&["invariants", "--map", "1,0,0;0,0,1"]);
    assert_eq!(out.status.code(), Some(0));

    // 1: domain error, JSON on stderr, nothing on stdout.
    let out = run(&["invariants", "--map", "1,0,0;2,0,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert_eq!(stderr(&out).trim(), "{\"error\":\"degenerate map\"}");

    let out = run(&["reduce", "--map", "1,0,0;0,0,1", "--prime", "6"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert!(v["error"].is_string());

    // 2: usage error (unknown flag), JSON on stderr.
    let out = run(&["invariants", "--wat"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert!(v["error"].is_string());

    // 2: usage error (missing required flag).
    let out = run(&["reduce", "--map", "1,0,0;0,0,1"]);
    assert_eq!(out.status.code(), Some(2));

    // 2: usage error (non-integer where an integer is required).
    let out = run(&["reduce", "--map", "1,0,0;0,0,1", "--prime", "two"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_output_contract() {
    let out = run(&["sunit-solve", "--S", "2", "--bound", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "x,y\n-1,2\n1/2,1/2\n2,-1\n");

    let out = run(&["family", "--kind", "cpnf", "--p", "2", "--N", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "n,map\n0,\"1,0,1;15,0,16\"\n1,\"2,0,1;15,0,8\"\n");

    let out = run(&["invariants", "--map", "1,0,0;0,0,1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn conjugate_and_reduce_pipeline() {
    let out = run(&["conjugate", "--map", "1,0,1;3,0,4", "--pgl", "2,0;0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let conj = v["map"].as_str().unwrap();

    // Conjugation preserves the invariants.
    let before = run(&["invariants", "--map", "1,0,1;3,0,4"]);
    let after = run(&["invariants", "--map", conj]);
    let vb: serde_json::Value = serde_json::from_str(stdout(&before).trim()).unwrap();
    let va: serde_json::Value = serde_json::from_str(stdout(&after).trim()).unwrap();
    for key in ["sigma1", "sigma2", "sigma3"] {
        assert_eq!(vb[key], va[key]);
    }

    let out = run(&["reduce", "--map", "1,0,1;15,0,16", "--prime", "3"]);
    assert_eq!(
        stdout(&out),
        "{\"reduced\":\"1,0,1;0,0,1 mod 3; degree=2\",\"degree\":2}\n"
    );
}

#[test]
fn good_reduction_flag_combinations() {
    let out = run(&["good-reduction", "--map", "1,0,1;3,0,4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "{\"bad_primes\":[]}\n");

    let out = run(&["good-reduction", "--map", "1,1,0;0,1,2", "--outside-S", ""]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "{\"bad_primes\":[2],\"good_outside_s\":false}\n"
    );
}
