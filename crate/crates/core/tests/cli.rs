use std::process::{Command, Output};

use serde_json::Value;

fn cqed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqed-net"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = cqed(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn outcomes(v: &Value) -> &Vec<Value> {
    v["outcomes"].as_array().unwrap()
}

#[test]
fn ghz_atoms_report() {
    let v = json(&["run-scheme", "ghz-atoms", "--n", "6"]);
    assert_eq!(v["scheme"]["name"], "ghz-atoms");
    let rows = outcomes(&v);
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!((r["probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!((r["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(r["success"], true);
    }
}

#[test]
fn w3_probabilistic_failure_port() {
    let v = json(&["run-scheme", "w3-prob"]);
    let fail: Vec<&Value> = outcomes(&v)
        .iter()
        .filter(|r| r["success"] == false)
        .collect();
    assert_eq!(fail.len(), 1);
    assert!((fail[0]["probability"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(fail[0]["fidelity"].is_null());
}

#[test]
fn ring_graph_has_all_outcomes() {
    let v = json(&["run-scheme", "graph", "--kind", "ring", "--n", "4"]);
    let rows = outcomes(&v);
    assert_eq!(rows.len(), 16);
    for r in rows {
        assert!((r["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn graph_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(
        &path,
        r#"{"vertices": 4, "edges": [[0, 1], [1, 2], [1, 3]]}"#,
    )
    .unwrap();
    let v = json(&["run-scheme", "graph", "--graph", path.to_str().unwrap()]);
    let rows = outcomes(&v);
    assert_eq!(rows.len(), 8);
    assert!(rows
        .iter()
        .all(|r| (r["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9));
}

#[test]
fn every_scheme_runs() {
    for args in [
        vec!["w", "--n", "8"],
        vec!["w3-det"],
        vec!["cluster", "--n", "4"],
        vec!["ghz-fields", "--n", "4"],
        vec!["field-cz"],
        vec!["graph", "--kind", "star", "--n", "5"],
    ] {
        let mut full = vec!["run-scheme"];
        full.extend(args);
        let v = json(&full);
        let total: f64 = outcomes(&v)
            .iter()
            .map(|r| r["probability"].as_f64().unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12, "{full:?}");
    }
}

#[test]
fn numbers_carry_seventeen_digits() {
    let out = cqed(&["run-scheme", "w3-det"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut seen = 0;
    for token in text.split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']') {
        if token.contains('e') && token.parse::<f64>().is_ok() {
            let mantissa = token.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.len(), 18, "{token}");
            seen += 1;
        }
    }
    assert!(seen > 10);
}

#[test]
fn scheme_usage_errors() {
    assert_eq!(cqed(&["run-scheme", "bogus"]).status.code(), Some(2));
    assert_eq!(
        cqed(&["run-scheme", "ghz-atoms", "--n", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        cqed(&["run-scheme", "graph", "--kind", "ring", "--n", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cqed(&[]).status.code(), Some(2));
}

#[test]
fn sweep_cardinality_and_header() {
    let out = cqed(&["flip-sweep", "--g", "0.5,1,2,5", "--tau-range", "0.1:40:20"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "g_over_kappa,kappa_tau,P_flip");
    assert_eq!(lines.len(), 81);
}

#[test]
fn single_point_sweep() {
    let out = cqed(&["flip-sweep", "--g", "5", "--tau", "10"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(row[..2], [5.0, 10.0]);
    assert!(row[2] >= 0.95);
}

#[test]
fn sweep_rejects_bad_lists() {
    for args in [
        vec!["flip-sweep", "--g", "-1", "--tau", "1"],
        vec!["flip-sweep", "--g", "1,x", "--tau", "1"],
        vec!["flip-sweep", "--g", "1", "--tau-range", "1:2"],
        vec!["flip-sweep", "--g", "1", "--tau", "0"],
    ] {
        assert_eq!(cqed(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn retry_walk_reports() {
    let v = json(&["retry-walk", "--p", "1", "--n", "5"]);
    assert_eq!(v["success_prob"].as_f64(), Some(1.0));
    assert_eq!(v["conditional_fidelity"].as_f64(), Some(1.0));

    let v = json(&[
        "retry-walk",
        "--p",
        "0.8",
        "--n",
        "4",
        "--mc-trajectories",
        "1000000",
        "--seed",
        "7",
    ]);
    let mc = &v["monte_carlo"];
    assert_eq!(mc["seed"].as_u64(), Some(7));
    assert!(mc["abs_difference"].as_f64().unwrap() <= 0.01);

    assert_eq!(
        cqed(&["retry-walk", "--p", "0", "--n", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn output_is_deterministic() {
    let args = [
        "retry-walk",
        "--p",
        "0.6",
        "--n",
        "3",
        "--max-steps",
        "6",
        "--mc-trajectories",
        "20000",
        "--seed",
        "9",
    ];
    assert_eq!(cqed(&args).stdout, cqed(&args).stdout);
    let args = ["flip-sweep", "--g", "1,2", "--tau", "0.5,5"];
    assert_eq!(cqed(&args).stdout, cqed(&args).stdout);
    let args = ["run-scheme", "w", "--n", "4"];
    assert_eq!(cqed(&args).stdout, cqed(&args).stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = cqed(&[
        "flip-sweep",
        "--g",
        "1",
        "--tau",
        "1,2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);

    let bad = dir.path().join("missing/dir/x.json");
    let out = cqed(&["run-scheme", "w3-det", "--out", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
