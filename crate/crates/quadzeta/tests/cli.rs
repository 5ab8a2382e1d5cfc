use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadzeta"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().next().expect("no output")).unwrap()
}

#[test]
fn sgamma_example() {
    let out = run(&["sgamma", "--delta", "45"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["S"], serde_json::json!([["3", 1]]));
    assert_eq!(v["norm"], "3");
}

#[test]
fn orbital_value_and_weight() {
    let out = run(&["orbital", "--delta", "5"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["value"], "1/1");

    let out = run(&["orbital", "--weight", "3", "3", "2", "-1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["weight"]["coeff"], "5/1");
}

#[test]
fn oracle_tree_and_negative_delta() {
    let out = run(&["oracle", "tree", "--gamma", "3,1,9,0", "--p", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["count"], 5);

    let out = run(&["zagier", "--delta", "-4", "--re", "0.5", "--im", "2.0"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["fundamental_discriminant"], -4);
}

#[test]
fn exit_codes() {
    // guard violation
    let out = run(&["oracle", "ideals", "--delta", "5", "--n", "100000"]);
    assert_eq!(out.status.code(), Some(3));
    // unknown check name is a usage error
    let out = run(&["verify", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    // a passing suite exits 0
    let out = run(&["verify", "fe", "--count", "5", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn deterministic_output() {
    let args = ["verify", "fe", "--count", "8", "--seed", "42"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
