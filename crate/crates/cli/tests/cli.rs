use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn majlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_majlat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_error(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    v["error"].clone()
}

fn weights(v: &Value) -> Vec<Value> {
    v["weights"].as_array().unwrap().clone()
}

#[test]
fn analyze_worked_example_exact() {
    let out = majlat(&[
        "analyze",
        "--exact",
        "--psi",
        "[0.70,0.15,0.15]",
        "--phi",
        "[0.50,0.40,0.10]",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(weights(&r["chi_opt"]), ["7/10", "6/25", "3/50"]);
    assert_eq!(weights(&r["chi_sup"]), ["7/10", "1/5", "1/10"]);
    assert_eq!(r["case_label"], "incomparable");
    assert_eq!(r["success_probability"], "3/5");
    assert_eq!(r["theorem2_verified"], true);
    assert_eq!(r["opt_equals_sup"], false);
    assert!((r["fidelity_opt"].as_f64().unwrap() - 0.9583).abs() < 5e-4);
    assert!((r["fidelity_sup"].as_f64().unwrap() - 0.9496).abs() < 5e-4);
    assert!(r.get("trace").is_none());
}

#[test]
fn analyze_trivial_pair() {
    let out = majlat(&["analyze", "--psi", "[0.5,0.5]", "--phi", "[0.5,0.5]"]);
    let r = stdout_json(&out);
    assert_eq!(r["feasible"], true);
    assert_eq!(r["chi_opt"], r["phi"]);
    assert_eq!(r["chi_sup"], r["phi"]);
}

#[test]
fn analyze_trace_and_file_specs() {
    let dir = tempfile::tempdir().unwrap();
    let psi = dir.path().join("psi.json");
    fs::write(
        &psi,
        r#"{"weights": ["3/5", "3/20", "3/20", "1/10"], "mode": "exact"}"#,
    )
    .unwrap();
    let psi_arg = format!("@{}", psi.display());
    let out = majlat(&[
        "analyze",
        "--trace",
        "--psi",
        &psi_arg,
        "--phi",
        r#"{"weights": [0.50, 0.25, 0.20, 0.05], "mode": "exact"}"#,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = stdout_json(&out);
    assert_eq!(weights(&r["chi_sup"]), ["3/5", "7/40", "7/40", "1/20"]);
    assert_eq!(r["trace"]["iterations"], 1);
    assert_eq!(r["trace"]["steps"][0]["value"], "7/40");
}

#[test]
fn analyze_padding_matches_explicit_zeros() {
    let padded = majlat(&[
        "analyze",
        "--pad",
        "--psi",
        "[0.6,0.4]",
        "--phi",
        "[0.5,0.3,0.2]",
    ]);
    let explicit = majlat(&["analyze", "--psi", "[0.6,0.4,0]", "--phi", "[0.5,0.3,0.2]"]);
    assert_eq!(padded.status.code(), Some(0));
    assert_eq!(padded.stdout, explicit.stdout);

    let unpadded = majlat(&["analyze", "--psi", "[0.6,0.4]", "--phi", "[0.5,0.3,0.2]"]);
    assert_eq!(unpadded.status.code(), Some(2));
    assert_eq!(stderr_error(&unpadded)["kind"], "DimensionMismatch");
}

#[test]
fn validation_errors_exit_two_with_json() {
    for (args, kind) in [
        (
            vec!["analyze", "--psi", "[0.5,0.6]", "--phi", "[0.5,0.5]"],
            "SumNotOne",
        ),
        (
            vec!["analyze", "--psi", "[-0.5,1.5]", "--phi", "[0.5,0.5]"],
            "NegativeWeight",
        ),
        (
            vec!["analyze", "--psi", "nonsense", "--phi", "[1]"],
            "Parse",
        ),
        (
            vec!["analyze", "--psi", "@/no/such/file", "--phi", "[1]"],
            "Io",
        ),
        (
            vec![
                "analyze",
                "--psi",
                r#"{"weights":[1],"mode":"exact"}"#,
                "--phi",
                "[1]",
            ],
            "ModeMismatch",
        ),
        (vec!["frobnicate"], "Usage"),
        (vec!["analyze", "--psi", "[1]"], "Usage"),
        (
            vec!["--epsilon", "-1", "analyze", "--psi", "[1]", "--phi", "[1]"],
            "Usage",
        ),
    ] {
        let out = majlat(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_error(&out)["kind"], kind, "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn lattice_operations() {
    let sup = stdout_json(&majlat(&[
        "lattice",
        "sup",
        "[0.70,0.15,0.15]",
        "[0.50,0.40,0.10]",
        "--exact",
    ]));
    assert_eq!(weights(&sup["result"]), ["7/10", "1/5", "1/10"]);

    let p = "[0.6,0.3,0.1]";
    let inf = stdout_json(&majlat(&["lattice", "inf", p, p]));
    assert_eq!(weights(&inf["result"]), [0.6, 0.3, 0.1]);

    let dist = stdout_json(&majlat(&[
        "lattice",
        "dist",
        "[0.50,0.40,0.10]",
        "[0.70,0.20,0.10]",
    ]));
    assert!((dist["distance"].as_f64().unwrap() - 0.14153).abs() < 1e-5);

    let cmp = stdout_json(&majlat(&[
        "lattice",
        "compare",
        "[0.70,0.15,0.15]",
        "[0.50,0.40,0.10]",
    ]));
    assert_eq!(cmp["relation"], "incomparable");
    assert_eq!(cmp["witness"]["p_ahead"], 1);
    assert_eq!(cmp["witness"]["q_ahead"], 2);
}

#[test]
fn batch_csv_records() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pairs.csv");
    let output = dir.path().join("reports.jsonl");
    fs::write(
        &input,
        "id,psi,phi\n\
         forward,0.70;0.15;0.15,0.50;0.40;0.10\n\
         reverse,0.50;0.40;0.10,0.70;0.15;0.15\n\
         broken,NaN;1,0.5;0.5\n\
         forward,0.5;0.5,0.5;0.5\n",
    )
    .unwrap();
    let out = majlat(&[
        "batch",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_json(&out),
        serde_json::json!({"records": 4, "ok": 2, "failed": 2})
    );

    let lines: Vec<Value> = fs::read_to_string(&output)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["report"]["case_label"], "incomparable");
    assert_eq!(lines[1]["report"]["case_label"], "incomparable");
    assert_eq!(lines[2]["error"]["kind"], "NonFinite");
    assert_eq!(lines[3]["error"]["kind"], "DuplicateId");
}

#[test]
fn batch_jsonl_and_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pairs.jsonl");
    let output = dir.path().join("out.jsonl");
    fs::write(
        &input,
        "{\"id\":\"q\",\"psi\":[\"4/5\",\"1/5\"],\"phi\":[\"3/5\",\"2/5\"]}\n{\"id\":\"bad\"}\n",
    )
    .unwrap();
    let out = majlat(&[
        "--exact",
        "batch",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(stdout_json(&out)["ok"], 1);
    let text = fs::read_to_string(&output).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["report"]["case_label"], "reverse_feasible");
    assert_eq!(weights(&first["report"]["chi_opt"]), ["4/5", "1/5"]);

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out = majlat(&[
        "batch",
        "--input",
        empty.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["records"], 0);
    assert_eq!(fs::read_to_string(&output).unwrap(), "");
}

#[test]
fn batch_unreadable_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = majlat(&[
        "batch",
        "--input",
        dir.path().join("missing.csv").to_str().unwrap(),
        "--output",
        dir.path().join("out.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "Io");
}

#[test]
fn verify_suites() {
    let out = majlat(&[
        "verify",
        "locc",
        "--dims",
        "3",
        "--denoms",
        "20",
        "--samples",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["passed"], true);
    let names: Vec<&str> = r["properties"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["property"].as_str().unwrap())
        .collect();
    for n in [
        "resource_chain",
        "sup_distance_minimal",
        "delta3_noncoincidence",
    ] {
        assert!(names.contains(&n), "{n} missing");
    }

    let out = majlat(&["verify", "metric", "--samples", "10000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));

    let out = majlat(&["verify", "modularity", "--dims", "4", "--denoms", "20"]);
    let r = stdout_json(&out);
    assert_eq!(r["passed"], true);
    assert!(r["properties"][0]["counterexample"]["lhs"].is_array());
}

#[test]
fn verify_usage_errors() {
    let out = majlat(&["verify", "lattice", "--dims", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "BudgetExceeded");
    let out = majlat(&["verify", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_rows_and_gaps() {
    let out = majlat(&["scan", "--dim", "2", "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,fidelity_gap,distance_gap,case"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 1000);
    assert!(rows.iter().all(|r| r[1] == "0" && r[2] == "0"));

    let out = majlat(&["scan", "--dim", "3", "--samples", "1000", "--seed", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for row in text.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        assert!(cols[1].parse::<f64>().unwrap() >= -1e-9, "{row}");
        assert!(cols[2].parse::<f64>().unwrap() >= -1e-9, "{row}");
    }

    let out = majlat(&["scan", "--dim", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "Usage");
}

#[test]
fn outputs_are_byte_stable() {
    let runs = [
        vec!["scan", "--dim", "4", "--samples", "200", "--seed", "11"],
        vec![
            "verify",
            "all",
            "--dims",
            "3",
            "--denoms",
            "6",
            "--samples",
            "100",
            "--seed",
            "3",
        ],
        vec![
            "analyze",
            "--psi",
            "[0.4,0.35,0.25]",
            "--phi",
            "[0.5,0.2,0.2,0.1]",
            "--pad",
            "--trace",
        ],
    ];
    for args in runs {
        let a = majlat(&args);
        let b = majlat(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
