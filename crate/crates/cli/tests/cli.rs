use std::path::PathBuf;
use std::process::{Command, Output};

use num_rational::Rational64;
use serde_json::Value;

fn curvepull(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvepull"))
        .args(args)
        .env_remove("CURVEPULL_MAP_PATH")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = curvepull(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    });
    (out.status.code().unwrap(), v)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn parse_ratio(s: &str) -> Rational64 {
    let (p, q) = s.split_once('/').expect("weights are p/q");
    Rational64::new(p.parse().unwrap(), q.parse().unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("curvepull-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn rabbit_orbit_json_weights_round_trip() {
    let (code, v) = json(&["orbit", "--map", "rabbit", "--curve", "x"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "orbit");
    assert_eq!(v["map"], "rabbit");
    assert!(v["elapsed_ms"].is_number());
    let c = &v["results"]["classification"];
    assert_eq!(c["kind"], "cycle");
    assert_eq!(c["preperiod"], 0);
    assert_eq!(c["cycle"], serde_json::json!(["x", "y", "z"]));
    let weights: Vec<Rational64> = c["weights"].as_array().unwrap().iter().map(|w| parse_ratio(w.as_str().unwrap())).collect();
    assert_eq!(weights, vec![Rational64::new(1, 1), Rational64::new(1, 2), Rational64::new(1, 2)]);
    assert_eq!(parse_ratio(c["product"].as_str().unwrap()), Rational64::new(1, 4));
    for step in v["results"]["steps"].as_array().unwrap() {
        let w = parse_ratio(step["weight"].as_str().unwrap());
        let t = step["t"].as_i64().unwrap();
        let s = step["s"].as_i64().unwrap();
        assert_eq!(w, Rational64::new(t.abs(), s));
    }
}

#[test]
fn dendrite_orbit_examples() {
    let (_, v) = json(&["orbit", "--map", "dendrite", "--curve", "a"]);
    assert_eq!(v["results"]["classification"], serde_json::json!({"kind": "trivial", "steps": 1}));

    let (_, v) = json(&["orbit", "--map", "dendrite", "--curve", "b^(a b^-1 a^-1 b^-1 a)"]);
    let steps = v["results"]["steps"].as_array().unwrap();
    assert_eq!(steps[0]["weight"], "1/1");
    assert_eq!(steps[1]["weight"], "1/1");
    assert_eq!(steps[1]["target"], "b");
    assert_eq!(v["results"]["classification"]["kind"], "trivial");
}

#[test]
fn text_output_is_stable() {
    let args = ["sweep", "--map", "rabbit", "--max-len", "3"];
    let a = curvepull(&args);
    let b = curvepull(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let jobs = curvepull(&["sweep", "--map", "rabbit", "--max-len", "3", "--jobs", "2"]);
    assert_eq!(stdout(&a), stdout(&jobs));
}

#[test]
fn sweep_small_cases() {
    let (code, v) = json(&["sweep", "--map", "rabbit", "--max-len", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["curves"], 3);
    assert_eq!(v["results"]["cycle"], 3);
    assert_eq!(v["results"]["histogram"], serde_json::json!([{"classification": "cycle", "steps": 3, "count": 3}]));

    let (code, v) = json(&["sweep", "--map", "dendrite", "--max-len", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["trivial"], 3);
    assert_eq!(v["results"]["step_bound_checked"], true);
    for b in v["results"]["histogram"].as_array().unwrap() {
        assert!(b["steps"].as_u64().unwrap() <= 3);
    }
}

#[test]
fn verify_exit_codes() {
    let out = curvepull(&["verify", "--map", "rabbit", "--suite", "table7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("table7: 50/50 passed"));

    let out = curvepull(&["verify", "--map", "rabbit", "--suite", "lemma83"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("suite requires dendrite"));

    let out = curvepull(&["verify", "--map", "dendrite", "--suite", "table7"]);
    assert_eq!(out.status.code(), Some(2));

    let (code, v) = json(&["verify", "--map", "dendrite", "--suite", "prop84", "--n", "12", "--samples", "200"]);
    assert_eq!(code, 0);
    let items = v["results"]["suites"][0]["items"].as_array().unwrap();
    assert_eq!(items.len(), 13);
    assert!(items.iter().all(|i| i["pass"] == true));
}

#[test]
fn spectra_matrix_files() {
    let dir = scratch("spectra");
    let diag = dir.join("diag.txt");
    std::fs::write(&diag, "2\n1/2 0\n0 1/3\n").unwrap();
    let (code, v) = json(&["spectra", "--matrix", diag.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["lambda"], 0.5);
    assert_eq!(v["results"]["contracting"], true);

    let one = dir.join("one.txt");
    std::fs::write(&one, "1\n1\n").unwrap();
    let (_, v) = json(&["spectra", "--matrix", one.to_str().unwrap()]);
    assert_eq!(v["results"]["contracting"], false);

    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "2\n1 2\n3\n").unwrap();
    assert_eq!(curvepull(&["spectra", "--matrix", bad.to_str().unwrap()]).status.code(), Some(2));
    let neg = dir.join("neg.txt");
    std::fs::write(&neg, "1\n-1\n").unwrap();
    assert_eq!(curvepull(&["spectra", "--matrix", neg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(curvepull(&["spectra", "--matrix", "/nonexistent/m.txt"]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn spectra_cycle_of() {
    let (code, v) = json(&["spectra", "--map", "rabbit", "--cycle-of", "--curve", "y"]);
    assert_eq!(code, 0);
    let lambda = v["results"]["lambda"].as_f64().unwrap();
    assert!((lambda - 0.25f64.cbrt()).abs() < 1e-9);
    assert_eq!(v["results"]["certificate"]["product"], "1/4");
    assert_eq!(v["results"]["contracting"], true);

    // Dendrite orbits never cycle.
    let out = curvepull(&["spectra", "--map", "dendrite", "--cycle-of", "--curve", "b"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not cyclic"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["orbit", "--map", "rabbit", "--curve", "w"],
        vec!["orbit", "--map", "rabbit", "--curve", "x^(x q)"],
        vec!["orbit", "--map", "rabbit", "--curve", "x", "--max-steps", "0"],
        vec!["orbit", "--map", "airplane", "--curve", "x"],
        vec!["orbit", "--curve", "x"],
        vec!["sweep", "--map", "rabbit"],
        vec!["frobnicate"],
        vec!["--format", "yaml", "mapinfo", "--map", "rabbit"],
        vec!["sweep", "--map", "rabbit", "--max-len", "1", "--jobs", "0"],
    ] {
        assert_eq!(curvepull(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unresolved_exits_zero() {
    let (code, v) = json(&["orbit", "--map", "rabbit", "--curve", "x", "--max-steps", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["classification"], serde_json::json!({"kind": "unresolved", "max_steps": 2}));
}

#[test]
fn user_maps_from_search_path() {
    let dir = scratch("maps");
    std::fs::write(
        dir.join("bunny.map"),
        "map bunny\r\n# renamed rabbit\r\ngen p parity 0\r\ngen q parity 1\r\naxis r = q^-1 p^-1\r\n\
         schreier p -> q\r\nschreier q q -> q^-1 p^-1\r\nschreier q^-1 p q -> 1\r\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("broken.map"),
        "map broken\ngen p parity 0\ngen q parity 0\naxis r = q^-1 p^-1\n\
         schreier p -> q\nschreier q q -> q^-1 p^-1\nschreier q^-1 p q -> 1\n",
    )
    .unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_curvepull"))
            .args(args)
            .env("CURVEPULL_MAP_PATH", &dir)
            .output()
            .unwrap()
    };
    let out = run(&["orbit", "--map", "bunny", "--curve", "p", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["classification"]["cycle"], serde_json::json!(["p", "q", "r"]));

    let out = run(&["mapinfo", "--map", "bunny"]);
    assert!(stdout(&out).contains("axis r = q^-1 p^-1"));
    // Paper suites only apply to the built-ins.
    assert_eq!(run(&["verify", "--map", "bunny"]).status.code(), Some(2));

    let out = run(&["mapinfo", "--map", "broken"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("broken.map:3:") && err.contains("E003"), "{err}");

    let direct = dir.join("bunny.map");
    assert_eq!(curvepull(&["mapinfo", "--map", direct.to_str().unwrap()]).status.code(), Some(0));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn mapinfo_json() {
    let (code, v) = json(&["mapinfo", "--map", "rabbit"]);
    assert_eq!(code, 0);
    let r = &v["results"];
    assert_eq!(r["builtin"], "rabbit");
    assert_eq!(r["transversal"], "y");
    assert_eq!(r["axes"][2], serde_json::json!({"name": "z", "word": "y^-1 x^-1"}));
    assert_eq!(r["transducer"].as_array().unwrap().len(), 8);
}
