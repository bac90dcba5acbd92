use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qaffine")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

fn statuses(v: &Value) -> Vec<String> {
    v["verdicts"].as_array().unwrap().iter().map(|x| x["status"].as_str().unwrap().to_string()).collect()
}

#[test]
fn rmat_examples() {
    let (code, v) = json(&["rmat", "ybe"]);
    assert_eq!(code, 0);
    assert_eq!(statuses(&v), ["pass"]);

    let (code, v) = json(&["rmat", "limit", "--a", "1", "--b", "q^2", "--point", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["rank"], 1);
    assert_eq!(v["outputs"]["order"], 1);
    let limit = &v["outputs"]["limit"];
    assert_eq!(limit[1][2], "q^2 - 1");
    assert_eq!(limit[0], serde_json::json!(["0", "0", "0", "0"]));

    let (code, v) = json(&["rmat", "yang"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["block"], serde_json::json!([["u/(u + h)", "h/(u + h)"], ["h/(u + h)", "u/(u + h)"]]));
}

#[test]
fn chain_examples() {
    let (code, v) = json(&["chain", "tq", "--spec", &fixture("l2.json"), "--sector", "1"]);
    assert_eq!(code, 0);
    let qs = v["outputs"]["q_polynomials"].as_array().unwrap();
    assert_eq!(qs.len(), 2);
    for q in qs {
        assert!(q["tq_residual"].as_f64().unwrap() < 1e-8);
        assert_eq!(q["coefficients"].as_array().unwrap().len(), 2);
    }

    let (code, v) = json(&["chain", "commute", "--spec", &fixture("l8.json")]);
    assert_eq!(code, 0);
    assert!(v["verdicts"][0]["residual"].as_f64().unwrap() < 1e-10);

    let (code, v) = json(&["chain", "spectrum", "--spec", &fixture("l1.json"), "--sector", "0"]);
    assert_eq!(code, 0);
    // u + u⁻¹ q⁻¹ (z − 1)/(z − q⁻²), written over a common denominator.
    let lambda: &str = v["outputs"]["lambda"].as_str().unwrap();
    assert_eq!(lambda, "(q^2*z*u^2 + q*z - q - u^2)/(q^2*z*u - u)");
}

#[test]
fn cluster_examples() {
    let (code, v) = json(&["cluster", "explore", "--quiver", &fixture("frozen_path.json"), "--depth", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["clusters"], 2);
    assert_eq!(v["outputs"]["variables"], 4);
    assert_eq!(v["outputs"]["relations"], serde_json::json!(["X1p*X1 = X2 + X3"]));

    let (code, v) = json(&["cluster", "explore", "--quiver", &fixture("a2.json"), "--depth", "8"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["closed"], true);
    assert_eq!(v["outputs"]["variables"], 5);

    let (_, once) = json(&["cluster", "mutate", "--quiver", &fixture("frozen_path.json"), "--at", "1"]);
    let (code, twice) =
        json(&["cluster", "mutate", "--quiver", &fixture("frozen_path.json"), "--at", "1", "--at", "1"]);
    assert_eq!(code, 0);
    assert_eq!(once["outputs"]["seed"]["variables"][0], "(X2 + X3)/X1");
    assert_eq!(twice["outputs"]["seed"]["variables"], serde_json::json!(["X1", "X2", "X3"]));
    let arrows = |v: &Value| {
        let mut a: Vec<String> = v["arrows"].as_array().unwrap().iter().map(|x| x.to_string()).collect();
        a.sort();
        a
    };
    assert_eq!(arrows(&twice["outputs"]["seed"]["quiver"]), arrows(&twice["inputs"]["quiver"]));
}

#[test]
fn stab_examples() {
    let (code, v) = json(&["stab", "matrix", "--n", "1", "--chamber", "plus"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["matrix"], serde_json::json!([["-u", "-h"], ["0", "u - h"]]));

    let (code, v) = json(&["stab", "rmatrix", "--n", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["rmatrix"], serde_json::json!([["u/(u + h)", "h/(u + h)"], ["h/(u + h)", "u/(u + h)"]]));

    let (code, v) = json(&["stab", "cycle", "--n", "2", "--face", "u1=u2"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["nontrivial_walls"], 6);

    let (code, v) = json(&["stab", "matrix", "--spec", &fixture("stab_n2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["inputs"]["polarization"], serde_json::json!([1, -1, 1]));
}

#[test]
fn input_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["rmat", "normalize", "--a", "1+"],
        &["chain", "rtt", "--spec", "/does/not/exist.json"],
        &["cluster", "mutate", "--quiver", &fixture("frozen_path.json"), "--at", "2"],
        &["stab", "matrix", "--n", "2", "--chamber", "0,0,1"],
        &["stab", "matrix", "--n", "1", "--polarization", "1,1,1"],
        &["--negative-control", "stab", "roots"],
        &["chain", "nonsense", "--spec", "x"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["cluster", "mutate", "--quiver", &fixture("frozen_path.json"), "--at", "2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertex 2 is frozen"));
}

#[test]
fn genericity_violation_exits_two() {
    let dir = std::env::temp_dir().join(format!("qaffine-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("root_of_unity.json");
    std::fs::write(
        &path,
        r#"{"L": 2, "site_params": ["1", "1"], "aux_param": "1", "twist": "2", "q": "-1", "mode": "numeric"}"#,
    )
    .unwrap();
    let out = run(&["chain", "rtt", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("root of unity"));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["--json", "chain", "spectrum", "--spec", &fixture("l3.json"), "--sector", "1", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["inputs"]["seed"], 5);
    assert!(v["timing"].is_null());
}

#[test]
fn json_schema_fields() {
    let (_, v) = json(&["stab", "rmatrix", "--n", "2"]);
    for key in ["command", "inputs", "verdicts", "timing"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for verdict in v["verdicts"].as_array().unwrap() {
        for key in ["name", "status", "residual", "details"] {
            assert!(verdict.get(key).is_some(), "{key}");
        }
    }
    let out = run(&["--json", "--timing", "rmat", "yang"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["timing"]["seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn tolerance_override_fails_below_noise_floor() {
    // A tolerance below the attainable floor turns passing numeric checks
    // into failures; the report still completes.
    let (code, v) = json(&["chain", "rtt", "--spec", &fixture("l2.json"), "--tol", "1e-300"]);
    assert_eq!(code, 1);
    assert_eq!(statuses(&v), ["fail"]);
}

#[test]
fn negative_controls_fail() {
    let l2 = fixture("l2.json");
    let l3 = fixture("l3.json");
    let frozen_path = fixture("frozen_path.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["rmat", "ybe"],
        vec!["rmat", "yang"],
        vec!["rmat", "inverse"],
        vec!["rmat", "hexagon"],
        vec!["chain", "rtt", "--spec", &l2],
        vec!["chain", "commute", "--spec", &l3],
        vec!["chain", "tq", "--spec", &l2, "--sector", "1"],
        vec!["chain", "bethe", "--spec", &l2, "--sector", "1"],
        vec!["cluster", "explore", "--quiver", &frozen_path],
        vec!["stab", "matrix", "--n", "1", "--chamber", "plus"],
        vec!["stab", "cycle", "--n", "2"],
    ];
    for args in cases {
        let mut all = vec!["--negative-control"];
        all.extend(&args);
        assert_eq!(run(&all).status.code(), Some(1), "{args:?}");
    }
}
