use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn weak_tt(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weak-tt"))
        .args(args)
        .current_dir(dir)
        .env_remove("WEAK_TT_SEED")
        .output()
        .expect("binary runs")
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn keys_travel_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for scheme in ["short-ctext", "short-key"] {
        let out = weak_tt(&["setup", "--scheme", scheme, "--n", "5", "--m", "24", "--seed", "4", "--out", "s.json"], d);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        for j in 0..=5u64 {
            let js = j.to_string();
            let out = weak_tt(&["encrypt", "--system", "s.json", "--j", &js, "--seed", &js, "--out", "c.json"], d);
            assert!(out.status.success());
            let out = weak_tt(&["decrypt", "--system", "s.json", "--ciphertext", "c.json", "--out", "d.json"], d);
            assert!(out.status.success());
            let outputs = report(d, "d.json")["results"]["outputs"].as_array().unwrap().clone();
            let bits: Vec<&str> = outputs.iter().map(|o| o["output"].as_str().unwrap()).collect();
            let expect: Vec<&str> = (1..=5).map(|i| if i <= j { "1" } else { "0" }).collect();
            assert_eq!(bits, expect, "{scheme} j = {j}");
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let code = |args: &[&str]| weak_tt(args, d).status.code().unwrap();

    assert_eq!(code(&["verify", "sd-rd", "--p", "1/2,1/2", "--q", "1/4,3/4"]), 0);
    assert_eq!(code(&["verify", "correctness", "--unknown-flag"]), 2);
    assert_eq!(code(&["game", "index-hiding", "--adversary", "nobody", "--trials", "10"]), 2);
    assert_eq!(code(&["game", "index-hiding", "--n", "3", "--i-star", "4", "--trials", "10"]), 2);
    // Default m for ten short-ctext users is past the enumeration limit.
    assert_eq!(code(&["setup", "--n", "10"]), 3);
    let fail = [
        "verify", "index-hiding", "--adversary", "white-box-transparent", "--n", "3", "--decoders", "40",
        "--challenges", "100", "--out", "v.json",
    ];
    assert_eq!(code(&fail), 1);
    assert_eq!(report(d, "v.json")["status"], "fail");
}

#[test]
fn usage_errors_write_no_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = weak_tt(&["verify", "puncture", "--bogus", "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn seed_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_weak-tt"));
        c.args(["game", "puncture", "--trials", "200", "--json"]).args(extra).current_dir(d);
        match env {
            Some(v) => c.env("WEAK_TT_SEED", v),
            None => c.env_remove("WEAK_TT_SEED"),
        };
        c.output().unwrap().stdout
    };
    let from_env = run(Some("11"), &[]);
    assert_eq!(from_env, run(None, &["--seed", "11"]));
    assert_ne!(from_env, run(None, &[]));
    let v: Value = serde_json::from_slice(&from_env).unwrap();
    assert_eq!(v["config"]["seed"], 11);
}

#[test]
fn timings_only_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    weak_tt(&["bench", "--iterations", "5", "--out", "a.json"], d);
    weak_tt(&["bench", "--iterations", "5", "--timings", "--out", "b.json"], d);
    assert!(report(d, "a.json").get("timings").is_none());
    let t = report(d, "b.json")["timings"].clone();
    assert!(t["total_ms"].as_f64().unwrap() > 0.0);
    assert!(t["short-key-decrypt_us"].is_number());
}

#[test]
fn exact_attack_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = weak_tt(&["attack", "--mechanism", "exact", "--n", "6", "--runs", "20", "--seed", "7", "--json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let e = &v["results"]["experiment"];
    assert_eq!(e["target"], 3);
    assert_eq!(e["accusations"][3], 20);
    assert_eq!(e["violation"], true);
    assert_eq!(v["results"]["params"]["m"], 216);
    assert!(v["provenance"]["formulas"]["m"].as_str().unwrap().contains("n^3"));
}

#[test]
fn rationals_stay_exact_in_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = weak_tt(&["verify", "xor-identity", "--q0", "0.7", "--q1", "1/5", "--random", "0", "--json"], dir.path());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let first = &v["results"]["listed"][0];
    assert_eq!(first["q0"], serde_json::json!({ "num": "7", "den": "10" }));
    assert_eq!(first["two_adv"], serde_json::json!({ "num": "1", "den": "8" }));
}
