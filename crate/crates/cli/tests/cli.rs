use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_defectcert"))
        .args(args)
        .env_remove("DEFECTCERT_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn value_of_second_key_polynomial() {
    let o = run(&["value", "--ring", "uv", "v^4+u"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "17/16");
}

#[test]
fn constants_vanish_mod_p() {
    let o = run(&["--p", "3", "value", "3*u"]);
    assert_eq!(stdout(&o).trim(), "inf");
}

#[test]
fn parse_error_reports_offset() {
    let o = run(&["value", "u + )"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("offset 4"), "{err}");
}

#[test]
fn bad_prime_is_a_usage_error() {
    assert_eq!(run(&["--p", "4", "value", "u"]).status.code(), Some(2));
    assert_eq!(run(&["--p", "3", "--c", "3", "tower"]).status.code(), Some(2));
}

#[test]
fn expansion_lists_terms() {
    let o = run(&["expand", "v^5"]);
    let text = stdout(&o);
    assert!(text.contains("u*S1"), "{text}");
    assert!(text.contains("S1*S2"), "{text}");
}

#[test]
fn first_approximant_passes() {
    let o = run(&["ascheck", "t1", "--k", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("actual 17/16"));
}

#[test]
fn ladder_table() {
    let o = run(&["--kmax", "2", "--dump-values", "ascheck", "t2"]);
    let text = stdout(&o);
    for v in ["-15/32", "-239/512", "-3823/8192"] {
        assert!(text.contains(v), "{text}");
    }
}

#[test]
fn json_is_reproducible() {
    let args = ["--format", "json", "ascheck", "t1", "--k", "1"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["header"]["tool"], "defectcert");
    assert!(v["certificates"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn seed_flag_beats_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_defectcert"))
        .args(["--seed", "9", "--format", "json", "fuzz", "--what", "mult"])
        .env("DEFECTCERT_SEED", "7")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["header"]["config"]["seed"], "9");
}

#[test]
fn budget_overrun_is_not_a_failure() {
    let o = run(&["--budget", "3", "tower"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("BUDGET-EXCEEDED"));
}
