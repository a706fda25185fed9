use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn spstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spstab"))
        .args(args)
        .env_remove("SPSTAB_RING")
        .env_remove("SPSTAB_SEED")
        .output()
        .expect("run spstab")
}

fn report(dir: &Path, command: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(format!("{command}.json"))).expect("report written");
    serde_json::from_str(&text).expect("json")
}

fn check_schema(r: &Value, command: &str) {
    assert_eq!(r["schema"], 1);
    assert_eq!(r["command"], command);
    assert!(r["params"].is_object());
    assert!(r["timings"].is_null());
    let results = r["results"].as_array().expect("results");
    assert!(!results.is_empty());
    let all = results.iter().all(|x| x["pass"] != Value::Bool(false));
    assert_eq!(r["pass"], Value::Bool(all));
}

#[test]
fn verify_has_four_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let out = spstab(&["verify", "--ring", "3^2", "--trials", "50", "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "verify");
    check_schema(&r, "verify");
    let suites: Vec<&str> = r["results"].as_array().unwrap().iter().map(|x| x["suite"].as_str().unwrap()).collect();
    assert_eq!(suites, ["multlin", "ffitpa", "pfaffian", "snf"]);
    assert_eq!(r["pass"], true);
}

#[test]
fn orbits_example() {
    let out = spstab(&["orbits", "--ring", "3", "--n", "1", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    check_schema(&r, "orbits");
    let last = r["results"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["orbits"], 8);
    assert_eq!(last["skew_plus"], 8);
    assert_eq!(last["pass"], true);
}

#[test]
fn non_prime_power_is_config_error() {
    let out = spstab(&["orbits", "--ring", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a prime power"));
}

#[test]
fn randomized_suites_need_seed() {
    for cmd in ["verify", "limits", "group-homology"] {
        let out = spstab(&[cmd, "--ring", "5"]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    }
}

#[test]
fn unknown_suite_and_bad_flag_exit_2() {
    assert_eq!(spstab(&["verify", "--seed", "1", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(spstab(&["orbits", "--n", "x"]).status.code(), Some(2));
    assert_eq!(spstab(&["orbits", "--n", "9"]).status.code(), Some(2));
}

#[test]
fn reports_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (i, threads) in ["1", "4", "4"].iter().enumerate() {
        let sub = dir.path().join(i.to_string());
        let out = spstab(&[
            "verify", "--ring", "7", "--trials", "40", "--seed", "99", "--threads", threads, "--out", sub.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        texts.push(std::fs::read(sub.join("verify.json")).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[1], texts[2]);
}

#[test]
fn env_overrides_and_flag_precedence() {
    let run = |flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_spstab"));
        c.args(["limits", "--trials", "5"]).env("SPSTAB_RING", "5").env("SPSTAB_SEED", "3");
        if let Some(r) = flag {
            c.args(["--ring", r]);
        }
        let out = c.output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    let from_env = run(None);
    assert_eq!(from_env["params"]["ring"], "5");
    assert_eq!(from_env["params"]["seed"], 3);
    assert_eq!(run(Some("7"))["params"]["ring"], "7");
}

#[test]
fn suite_filter_and_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["limits", "--ring", "7", "--seed", "4", "--trials", "10"],
        vec!["mwk", "--ring", "5", "--n", "2"],
        vec!["complexes", "--ring", "3", "--n", "1", "--q", "2", "--r", "0"],
        vec!["group-homology", "--ring", "3", "--seed", "2", "--p-max", "1", "--suite", "vindep"],
    ] {
        let mut a = args.clone();
        a.extend(["--out", d]);
        let out = spstab(&a);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let r = report(dir.path(), args[0]);
        check_schema(&r, args[0]);
    }
    let gh = report(dir.path(), "group-homology");
    assert_eq!(gh["results"].as_array().unwrap().len(), 1);
    assert_eq!(gh["results"][0]["suite"], "vindep");
}
