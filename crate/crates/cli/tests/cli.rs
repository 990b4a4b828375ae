use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn diagrat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagrat"))
        .args(args)
        .env_remove("DIAGRAT_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn diag_prints_coefficients() {
    let o = diagrat(&["diag", "1/(1-x-y)", "--p", "5", "--order", "6"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1 2 1 0 0 2\n");
    let o = diagrat(&["diag", "1", "--p", "3", "--order", "3"]);
    assert_eq!(stdout(&o), "1 0 0\n");
}

#[test]
fn domain_errors_exit_2() {
    let o = diagrat(&["diag", "1/(x)", "--p", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("E_NOT_EXPANDABLE"));
    let o = diagrat(&["diag", "1/(1-x", "--p", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("E_SYNTAX"));
    let o = diagrat(&["diag", "1/(1-x)", "--p", "4"]);
    assert!(stderr(&o).starts_with("E_BAD_PRIME"));
}

#[test]
fn bounds_trace_ends_with_n() {
    let o = diagrat(&["bounds", "--n", "1", "--d", "2", "--h", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with('N') && last.ends_with("109"), "{text}");
    let o = diagrat(&["bounds", "--n", "1", "--d", "2", "--h", "3", "--p", "5", "--emit", "json"]);
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["N"]["value"], "109");
    assert_eq!(j["A"]["value"], "6105");
    assert_eq!(j["mode"], "exact");
}

#[test]
fn bounds_strict_mode_reports_bit_budget() {
    let o = diagrat(&["bounds", "--n", "2", "--d", "2", "--h", "2", "--strict"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("E_BIT_BUDGET"));
    let o = diagrat(&["bounds", "--n", "2", "--d", "2", "--h", "2", "--emit", "json"]);
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["mode"], "log2");
}

#[test]
fn decide_examples() {
    let o = diagrat(&["decide", "periodic", "1/(1-x-y)", "--p", "2", "--b", "0", "--period-cap", "4"]);
    assert_eq!(stdout(&o), "periodic(1,1)\n");
    let o = diagrat(&["decide", "finite", &fixture("central.rf"), "--p", "2", "--b", "1"]);
    assert_eq!(stdout(&o), "finite {0}\n");
    let o = diagrat(&["decide", "finite", &fixture("apery5.rf"), "--p", "5", "--b", "0"]);
    assert_eq!(stdout(&o), "infinite, least n = 1\n");
    let o = diagrat(&["decide", "empty", "1/(1-x-y)", "--p", "3", "--b", "2"]);
    assert_eq!(stdout(&o), "nonempty, least n = 1\n");
}

#[test]
fn apery_automaton_has_five_states() {
    let o = diagrat(&["automaton", &fixture("apery5.rf"), "--p", "5", "--minimize", "--emit", "dot"]);
    assert!(o.status.success());
    let dot = stdout(&o);
    let nodes = dot.lines().filter(|l| l.contains("shape=circle")).count();
    assert_eq!(nodes, 5);
}

#[test]
fn annihilator_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ann.json");
    let o = diagrat(&["annihilate", &fixture("central.rf"), "--p", "5"]);
    assert!(o.status.success());
    std::fs::write(&path, &o.stdout).unwrap();
    let again = diagrat(&["annihilate", &fixture("central.rf"), "--p", "5", "--load", path.to_str().unwrap()]);
    assert!(again.status.success(), "{}", stderr(&again));
    assert_eq!(again.stdout, o.stdout);

    let mut j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    j["coefficients"][0][0] = serde_json::json!(2);
    std::fs::write(&path, j.to_string()).unwrap();
    let bad = diagrat(&["annihilate", &fixture("central.rf"), "--p", "5", "--load", path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(4));
    assert!(stderr(&bad).starts_with("E_VERIFY_FAIL"));
}

#[test]
fn automaton_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dfao.json");
    let apery = fixture("apery5.rf");
    let o = diagrat(&["automaton", &apery, "--p", "5", "--emit", "json"]);
    std::fs::write(&path, &o.stdout).unwrap();
    let p = path.to_str().unwrap();
    let loaded = diagrat(&["automaton", &apery, "--load", p, "--terms", "625"]);
    assert!(loaded.status.success(), "{}", stderr(&loaded));
    let direct = diagrat(&["diag", &apery, "--p", "5", "--order", "20"]);
    let loaded20 = diagrat(&["automaton", "--load", p, "--terms", "20"]);
    assert_eq!(stdout(&loaded20), stdout(&direct));

    let mut j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let states = j["states"].as_array_mut().unwrap();
    let out = states[0]["output"].as_u64().unwrap();
    states[0]["output"] = serde_json::json!((out + 1) % 5);
    std::fs::write(&path, j.to_string()).unwrap();
    let bad = diagrat(&["automaton", &apery, "--load", p]);
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn rationalize_square_root() {
    let o = diagrat(&["rationalize", &fixture("sqrt.poly"), "--p", "7", "--root", "0,1,3", "--emit", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["heightBudget"], 109);
    assert_eq!(j["verifiedToOrder"], 200);
    assert_eq!(j["shift"]["i"], 2);
    let bad = diagrat(&["rationalize", "y^2 - x^2 + x^3", "--p", "7", "--root", "0,2,0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn lucas_and_survey() {
    let o = diagrat(&["lucas", "catalan", "--p", "2"]);
    assert_eq!(stdout(&o), "counterexample n=1 j=0\n");
    let o = diagrat(&["lucas", "central", "--p", "5", "--frobenius", "500"]);
    assert!(stdout(&o).starts_with("pass\nfrobenius pass"));
    let o = diagrat(&["survey", "f6"]);
    assert_eq!(
        stdout(&o),
        "family,param,p,rank,maxOreDegree,lowerRef,upperRefLog2,states,millis\n"
    );
}

#[test]
fn output_is_deterministic() {
    let args = ["survey", "f6", "--primes", "7,11"];
    assert_eq!(diagrat(&args).stdout, diagrat(&args).stdout);
    let args = ["automaton", "1/(1-x-y-z)", "--p", "3", "--emit", "json"];
    assert_eq!(diagrat(&args).stdout, diagrat(&args).stdout);
}

#[test]
fn config_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diagrat.toml");
    std::fs::write(&path, "precision = 4\nstate_budget = 1\n").unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_diagrat"))
            .args(args)
            .env("DIAGRAT_CONFIG", &path)
            .output()
            .unwrap()
    };
    assert_eq!(stdout(&run(&["diag", "1/(1-x-y)", "--p", "7"])), "1 2 6 6\n");
    let o = run(&["automaton", "1/(1-x-y)", "--p", "7"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("E_STATE_BUDGET"));
    std::fs::write(&path, "precision = 0\n").unwrap();
    assert_eq!(run(&["diag", "1", "--p", "7"]).status.code(), Some(2));
    std::fs::write(&path, "colour = 1\n").unwrap();
    assert_eq!(run(&["diag", "1", "--p", "7"]).status.code(), Some(2));
}
