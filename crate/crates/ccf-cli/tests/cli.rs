use std::process::{Command, Output};

use serde_json::Value;

fn ccf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_owned())
        .collect()
}

#[test]
fn even_expansion_of_i_sqrt2() {
    let out = ccf(&["expand", "--poly", "1,0,2", "--ring", "G", "--alg", "even", "--steps", "10", "--full"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(strings(&r["partial_quotients"])[..5], ["2i", "2i", "4i", "2i", "4i"]);
    assert_eq!(strings(&r["q_abs2"])[..4], ["1", "4", "49", "144"]);
}

#[test]
fn hurwitz_expansion_finds_the_period() {
    let out = ccf(&["expand", "--poly", "1,0,2", "--alg", "hurwitz"]);
    assert_eq!(json(&out)["result"]["termination"]["kind"], "period_found");
    let out = ccf(&["expand", "--poly", "1,0,2", "--alg", "hurwitz", "--steps", "6", "--full"]);
    let r = &json(&out)["result"];
    assert_eq!(r["termination"]["kind"], "period_found");
    assert_eq!(strings(&r["q_abs2"])[..5], ["1", "4", "25", "144", "841"]);
}

#[test]
fn circle_with_a_rational_point() {
    let out = ccf(&["certify", "--ring", "G", "--r2", "5/2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["verdict"]["witness_fraction"], "(2+i)/(1+i)");
}

#[test]
fn bad_circle_over_eisenstein() {
    let out = ccf(&["bad-circle", "--ring", "E", "--r2", "1847"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["verdict"]["kind"], "certified_bad");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| ccf(args).status.code();
    assert_eq!(code(&["expand", "--poly", "1,0,1"]), Some(2), "reducible polynomial");
    assert_eq!(code(&["expand", "--poly", "1,0,2", "--alg", "chi:x=9/4"]), Some(2), "chi out of range");
    assert_eq!(code(&["expand", "--ball", "0.5+0.5i@0.3", "--steps", "5"]), Some(3), "ball too wide");
    assert_eq!(code(&["certify", "--r2", "1000000000000001"]), Some(4), "factorization budget");
    assert_eq!(code(&["verify", "geometry", "--check", "h-perturb", "--r", "0.35"]), Some(1), "violation");
    assert_eq!(code(&["verify", "geometry", "--check", "h-perturb", "--r", "0.9"]), Some(2), "r out of range");
    assert_eq!(code(&["expand", "--poly", "1,0,2", "-o", "/nonexistent/dir/x.json"]), Some(6), "unwritable output");
}

#[test]
fn monotone_suite_passes_for_even() {
    let out = ccf(&["verify", "monotone", "--alg", "even", "--corpus", "surds:30:seed=7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["violations"], 0);
}

#[test]
fn condition_h_suite_reports_even_violations() {
    let out = ccf(&["verify", "conditionH", "--alg", "even", "--corpus", "surds:10:seed=7"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out)["result"].clone();
    assert!(r["violations"].as_u64().unwrap() > 0);
    let h = ccf(&["verify", "conditionH", "--alg", "hurwitz", "--corpus", "surds:10:seed=7"]);
    assert_eq!(h.status.code(), Some(0));
}

#[test]
fn reports_are_reproducible() {
    let run = || {
        let out = ccf(&["verify", "identities", "--alg", "lambda", "--corpus", "surds:12:seed=3"]);
        assert_eq!(out.status.code(), Some(0));
        let mut v = json(&out);
        v.as_object_mut().unwrap().remove("generated_at");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn config_file_is_echoed_and_validated() {
    let dir = std::env::temp_dir().join(format!("ccf-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.toml");
    std::fs::write(&good, "seed = 11\nexact_budget = 300\n").unwrap();
    let out = ccf(&["--config", good.to_str().unwrap(), "expand", "--poly", "1,0,2"]);
    assert_eq!(out.status.code(), Some(0));
    let cfg = &json(&out)["config"];
    assert_eq!(cfg["seed"], 11);
    assert_eq!(cfg["exact_budget"], 300);

    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "unknown_key = 1\n").unwrap();
    assert_eq!(ccf(&["--config", bad.to_str().unwrap(), "expand", "--poly", "1,0,2"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn oracle_csv() {
    let out = ccf(&["--format", "csv", "oracle", "--poly", "1,0,2", "--qmax", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("q,"));
    assert_eq!(lines.count(), 12);
}
