use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn alignfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alignfree"))
        .args(args)
        .env_remove("ALIGNFREE_SEED")
        .output()
        .expect("binary runs")
}

fn schema() -> jsonschema::JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&raw).expect("schema compiles")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn assert_valid(doc: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(doc) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "schema violations: {msgs:?}");
}

#[test]
fn report_all_json_is_schema_valid_and_passes() {
    let out = alignfree(&["report-all", "--format", "json", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_valid(&doc);
    assert_eq!(doc["pass"], Value::Bool(true));
    assert_eq!(doc["metadata"]["seed"], 3);
    let names: Vec<&str> = doc["sections"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "correlations",
            "experiment",
            "protocol-split",
            "decoherence",
            "distinguish",
            "hardy",
            "lhv"
        ]
    );
}

#[test]
fn report_all_is_byte_identical_for_a_seed() {
    let a = alignfree(&["report-all", "--format", "json", "--seed", "11"]);
    let b = alignfree(&["report-all", "--format", "json", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let t1 = alignfree(&["report-all", "--seed", "11"]);
    let t2 = alignfree(&["report-all", "--seed", "11"]);
    assert_eq!(t1.stdout, t2.stdout);
}

#[test]
fn seed_env_var_sets_default_seed() {
    let out = Command::new(env!("CARGO_BIN_EXE_alignfree"))
        .args(["lhv-check", "--format", "json"])
        .env("ALIGNFREE_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(json_of(&out)["metadata"]["seed"], 42);
    let flag = alignfree(&[
        "verify-decoherence",
        "--samples",
        "50",
        "--seed",
        "42",
        "--format",
        "json",
    ]);
    let env = Command::new(env!("CARGO_BIN_EXE_alignfree"))
        .args(["verify-decoherence", "--samples", "50", "--format", "json"])
        .env("ALIGNFREE_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
}

#[test]
fn every_subcommand_emits_a_valid_report() {
    let cases: [&[&str]; 6] = [
        &["verify-correlations"],
        &["simulate", "--rounds", "20000"],
        &["verify-decoherence", "--samples", "100"],
        &["verify-distinguish", "--grid", "120"],
        &["optimize-hardy", "--starts", "8"],
        &["lhv-check"],
    ];
    for args in cases {
        let mut full = args.to_vec();
        full.extend(["--format", "json"]);
        let out = alignfree(&full);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        assert_valid(&json_of(&out));
    }
}

#[test]
fn correlation_claims_carry_expected_values() {
    let doc = json_of(&alignfree(&[
        "verify-correlations",
        "--rotations",
        "0",
        "--format",
        "json",
    ]));
    let checks = doc["sections"][0]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    let expected: Vec<f64> = checks.iter().map(|c| c["expected"].as_f64().unwrap()).collect();
    assert_eq!(expected, [0.0, 1.0, 1.0, 9.0 / 112.0]);
    assert!(checks.iter().all(|c| c["provenance"] == "published"));
}

#[test]
fn tolerance_below_float_precision_fails() {
    let out = alignfree(&["verify-correlations", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("OVERALL FAIL"));
}

#[test]
fn free_angles_reach_golden_value() {
    let doc = json_of(&alignfree(&[
        "optimize-hardy",
        "--free-angles",
        "--starts",
        "16",
        "--format",
        "json",
    ]));
    let checks = doc["sections"][0]["checks"].as_array().unwrap();
    let free = checks.iter().find(|c| c["claim_id"] == "free-angle-optimum").unwrap();
    assert!((free["computed"].as_f64().unwrap() - 0.0901699437).abs() < 1e-6);
}

#[test]
fn lhv_check_prints_narrative() {
    let out = alignfree(&["lhv-check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("contradicting P(g_A=1 ∧ g_B=1) = 9/112"));
}

#[test]
fn single_round_simulation_writes_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("record.json");
    let out = alignfree(&["simulate", "--rounds", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rec: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rec["rounds"], 1);
    let total: u64 = rec["tallies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            t["counts"]
                .as_object()
                .unwrap()
                .values()
                .map(|v| v.as_u64().unwrap())
                .sum::<u64>()
        })
        .sum();
    assert_eq!(total, 1);
}

#[test]
fn rotation_each_round_keeps_verdicts() {
    let plain = json_of(&alignfree(&["simulate", "--rounds", "50000", "--format", "json"]));
    let rotated = json_of(&alignfree(&[
        "simulate",
        "--rounds",
        "50000",
        "--rotate-each-round",
        "--format",
        "json",
    ]));
    let verdicts = |d: &Value| -> Vec<(String, bool)> {
        d["sections"][0]["checks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| {
                (
                    c["claim_id"].as_str().unwrap().to_string(),
                    c["pass"].as_bool().unwrap(),
                )
            })
            .collect()
    };
    assert_eq!(verdicts(&plain), verdicts(&rotated));
    assert!(verdicts(&plain).iter().all(|(_, p)| *p));
}

#[test]
fn exit_codes() {
    assert_eq!(alignfree(&["simulate", "--rounds", "0"]).status.code(), Some(2));
    assert_eq!(alignfree(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        alignfree(&["verify-distinguish", "--grid", "10"]).status.code(),
        Some(2)
    );
    let out = alignfree(&["simulate", "--rounds", "1", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(out.status.code(), Some(3));
}
