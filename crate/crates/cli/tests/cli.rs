use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn orbitfisher(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitfisher"))
        .args(args)
        .output()
        .unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("orbitfisher-{}-{name}", std::process::id()))
}

#[test]
fn orbit_info_examples() {
    let out = orbitfisher(&["orbit-info", "--json", r#"{"n":2,"lambda":[0.75,0.25]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["orbit_dim"], 2);
    assert_eq!(v["roots"][0]["ij"], serde_json::json!([1, 2]));
    assert_eq!(v["roots"][0]["alpha"], 0.5);
    assert_eq!(v["roots"][0]["beta"], 1.0);

    let out = orbitfisher(&["orbit-info", "--json", r#"{"n":3,"lambda":[0.5,0.3,0.2]}"#]);
    let v = json_of(&out);
    assert_eq!(v["orbit_dim"], 6);
    let ij: Vec<Value> = v["roots"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["ij"].clone())
        .collect();
    assert_eq!(
        ij,
        vec![
            serde_json::json!([1, 2]),
            serde_json::json!([1, 3]),
            serde_json::json!([2, 3])
        ]
    );

    let mixed = orbitfisher(&[
        "orbit-info",
        "--json",
        r#"{"n":3,"lambda":[0.3333333333333333,0.3333333333333333,0.3333333333333334]}"#,
    ]);
    assert_eq!(json_of(&mixed)["orbit_dim"], 0);
}

#[test]
fn exit_codes() {
    let bad_sum = orbitfisher(&["orbit-info", "--json", r#"{"n":2,"lambda":[0.7,0.7]}"#]);
    assert_eq!(bad_sum.status.code(), Some(3));
    let bad_len = orbitfisher(&["orbit-info", "--json", r#"{"n":3,"lambda":[0.5,0.5]}"#]);
    assert_eq!(bad_len.status.code(), Some(3));
    let bad_json = orbitfisher(&["orbit-info", "--json", "{not json"]);
    assert_eq!(bad_json.status.code(), Some(2));
    let missing = orbitfisher(&["orbit-info", "--input", "/nonexistent/state.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn fisher_examples() {
    let pure = json_of(&orbitfisher(&[
        "fisher",
        "--json",
        r#"{"n":2,"lambda":[1,0]}"#,
    ]));
    assert_eq!(pure["delta"], serde_json::json!([1.0]));
    let mixed = json_of(&orbitfisher(&[
        "fisher",
        "--json",
        r#"{"n":2,"lambda":[0.75,0.25]}"#,
    ]));
    assert!((mixed["delta"][0].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(mixed["basis"], serde_json::json!(["s_12", "a_12"]));
    let empty = json_of(&orbitfisher(&[
        "fisher",
        "--json",
        r#"{"n":2,"lambda":[0.5,0.5]}"#,
    ]));
    assert_eq!(empty["F"], serde_json::json!([]));

    let chart = orbitfisher(&[
        "fisher",
        "--json",
        r#"{"n":3,"lambda":[0.5,0.3,0.2],"chart":[[0.1,0.2],[0.3,-0.1],[0.0,0.4]]}"#,
    ]);
    assert_eq!(chart.status.code(), Some(0));
    assert!(
        json_of(&chart)["residuals"]["closed_form"]
            .as_f64()
            .unwrap()
            < 1e-9
    );
}

#[test]
fn verify_scopes_and_tolerance_probe() {
    let out = orbitfisher(&["verify", "linfisher", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["pass"], true);

    let tight = orbitfisher(&[
        "verify",
        "fisher",
        "--samples",
        "10",
        "--max-n",
        "3",
        "--tol",
        "1e-15",
    ]);
    assert_eq!(tight.status.code(), Some(1));
    let v = json_of(&tight);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["pass"] == false));
}

#[test]
fn fibration_examples() {
    let ok = orbitfisher(&[
        "fibration",
        "--json",
        r#"{"total":{"n":3,"lambda":[0.5,0.3,0.2]},"base":{"n":3,"lambda":[0.6,0.2,0.2]}}"#,
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json_of(&ok);
    assert_eq!(
        v["dims"],
        serde_json::json!({"total": 6, "fibre": 2, "base": 4})
    );
    assert_eq!(v["pass"], true);

    let identity = json_of(&orbitfisher(&[
        "fibration",
        "--json",
        r#"{"total":{"n":3,"lambda":[0.5,0.3,0.2]},"base":{"n":3,"lambda":[0.5,0.3,0.2]}}"#,
    ]));
    assert_eq!(identity["dims"]["fibre"], 0);

    let crossed =
        r#"{"total":{"n":3,"lambda":[0.4,0.4,0.2]},"base":{"n":3,"lambda":[0.5,0.25,0.25]}}"#;
    let bad = orbitfisher(&["fibration", "--json", crossed]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("coarsen"));
    assert_eq!(
        orbitfisher(&["verify", "fibration", "--json", crossed])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn linfisher_examples() {
    let j0 = "[[0,-1,0,0],[1,0,0,0],[0,0,0,-1],[0,0,1,0]]";
    let check = orbitfisher(&["linfisher", "check", "--json", j0]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(json_of(&check)["roots"], serde_json::json!([1.0, 1.0]));

    let two = "[[0,-2,0,0],[2,0,0,0],[0,0,0,-2],[0,0,2,0]]";
    let nf = json_of(&orbitfisher(&["linfisher", "normal-form", "--json", two]));
    assert_eq!(nf["roots"], serde_json::json!([[2.0, 2]]));

    let sym = orbitfisher(&["linfisher", "check", "--json", "[[1,2],[2,3]]"]);
    assert_eq!(sym.status.code(), Some(1));
    assert_eq!(json_of(&sym)["failure"], "not skew-adjoint");
    assert_eq!(
        orbitfisher(&["linfisher", "normal-form", "--json", "[[1,2],[2,3]]"])
            .status
            .code(),
        Some(1)
    );

    let scaled = json_of(&orbitfisher(&[
        "linfisher",
        "scale",
        "--json",
        r#"{"matrix":[[[0,1]]],"q":[2]}"#,
    ]));
    assert_eq!(scaled["roots"], serde_json::json!([2.0]));
    assert_eq!(
        orbitfisher(&[
            "linfisher",
            "scale",
            "--json",
            r#"{"matrix":[[[0,1]]],"q":[0]}"#
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        orbitfisher(&["linfisher", "check", "--json", "[[1,2]]"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn input_and_output_files() {
    let input = scratch("state.json");
    let output = scratch("report.json");
    std::fs::write(&input, r#"{"n":2,"lambda":[0.75,0.25]}"#).unwrap();
    let out = orbitfisher(&[
        "orbit-info",
        "--input",
        input.to_str().unwrap(),
        "--out",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["orbit_dim"], 2);
    let _ = std::fs::remove_file(input);
    let _ = std::fs::remove_file(output);
}
