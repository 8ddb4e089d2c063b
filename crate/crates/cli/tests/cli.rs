use std::process::{Command, Output};

use serde_json::Value;

fn nks3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nks3"))
        .args(args)
        .env_remove("NKS3_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn structure_suite_exits_zero() {
    let out = nks3(&["verify", "--suite", "structure", "--seed", "42", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["suite"], "structure");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn unknown_suite_is_usage_error() {
    assert_eq!(nks3(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(nks3(&["verify", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(nks3(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn full_report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = nks3(&[
        "verify",
        "--suite",
        "all",
        "--samples",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for key in ["suite", "seed", "checks", "duration_ms"] {
        assert!(v.get(key).is_some());
    }
    assert_eq!(v["checks"], json(&out)["checks"]);
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("report.json");
    let out = nks3(&[
        "verify",
        "--suite",
        "isometry",
        "--samples",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn single_example_hypersurface_suite() {
    let out = nks3(&[
        "verify",
        "--suite",
        "hypersurface",
        "--family",
        "m3",
        "--r",
        "1",
        "--samples",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let trace = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "trace")
        .unwrap();
    assert!(trace["max_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(
        nks3(&["verify", "--suite", "hypersurface", "--family", "m3", "--r", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seed_precedence() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_nks3"));
        cmd.args(["verify", "--suite", "isometry", "--samples", "2"])
            .env_remove("NKS3_SEED");
        if let Some(e) = env {
            cmd.env("NKS3_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        json(&cmd.output().unwrap())["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("17"), None), 17);
    assert_eq!(run(Some("17"), Some("4")), 4);
}

fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn radius_sweep() {
    let out = nks3(&["sweep", "--family", "m1", "--r", "0.2:1.0:0.1", "--samples", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(
        header.join(","),
        "family,r,k,l,ev1,ev2,ev3,ev4,ev5,mult_pattern,traceA,pxi_class,theta"
    );
    assert_eq!(rows.len(), 9);
    let f = |s: &str| s.parse::<f64>().unwrap();
    for row in &rows {
        let r = f(&row[1]);
        let ev: Vec<f64> = row[4..9].iter().map(|s| f(s)).collect();
        // λ and β are the two doubled values
        let (lambda, beta) = (ev[0], ev[4]);
        assert!((lambda + beta - (1.0 - r * r).sqrt() / r).abs() < 1e-6, "r={r}");
        assert_eq!(row[9], "1,2,2");
        assert_eq!(row[11], "PLUS");
        assert!(row[2].is_empty() && row[3].is_empty());
    }
    let last = rows.last().unwrap();
    assert_eq!(last[1], "1");
    assert!(f(&last[10]).abs() <= 1e-6);
}

#[test]
fn torus_sweep_and_domain() {
    let out = nks3(&["sweep", "--family", "m5", "--k", "0.6,0.8", "--samples", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][3], "0.8");
    assert!(rows
        .iter()
        .all(|r| r[9] == "1,1,1,1,1" && r[11] == "MINUS" && r[12].is_empty()));
    assert_eq!(
        nks3(&["sweep", "--family", "m1", "--r", "0.01,0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(nks3(&["sweep", "--family", "m1", "--r", "1.2"]).status.code(), Some(2));
    assert_eq!(
        nks3(&["sweep", "--family", "m4", "--k", "0.6", "--l", "0.6"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(nks3(&["sweep", "--family", "m4", "--r", "0.6"]).status.code(), Some(2));
}

#[test]
fn analyze_prints_point_json() {
    let out = nks3(&["analyze", "--family", "m1", "--r", "1", "--at", "0,0,0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["alpha"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(v["pxi_class"], "PLUS");
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 5);

    let v = json(&nks3(&["analyze", "--family", "m2", "--r", "0.7"]));
    assert_eq!(v["pxi_class"], "MINUS");
    let v = json(&nks3(&[
        "analyze",
        "--family",
        "m6",
        "--k",
        "0.6",
        "--at",
        "0.1,0,0,0.2,-0.1",
    ]));
    assert_eq!(v["pxi_class"], "REFLECT");
}

#[test]
fn malformed_point_is_usage_error() {
    assert_eq!(
        nks3(&["analyze", "--family", "m1", "--r", "1", "--at", "0,0,x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nks3(&["analyze", "--family", "m1", "--r", "1", "--at", "0,0,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(nks3(&["analyze", "--family", "m1"]).status.code(), Some(2));
}
