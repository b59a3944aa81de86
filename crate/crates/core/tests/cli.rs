// SPDX-License-Identifier: MIT OR Apache-2.0

//! End-to-end runs of the `hetcp` binary.

use std::path::Path;
use std::process::{Command, Output};

use hetcp::bootstrap::StatKind;
use hetcp::io::save_csv;
use hetcp::simulate::{run_rejection_experiment, sample_panel, Covariance, MeanPlan, Scenario, ScenarioSpec, Trend};
use serde_json::Value;

fn hetcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetcp")).args(args).output().unwrap()
}

fn write_panel(dir: &Path, name: &str, mean: MeanPlan) -> String {
    let spec = ScenarioSpec::null(40, 6, Covariance::Ar { rho: 0.3 }, Trend::A1).with_mean(mean);
    let path = dir.join(name);
    save_csv(&sample_panel(&spec, 17).unwrap(), &path).unwrap();
    path.to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn reports_are_reproducible_apart_from_timings() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_panel(dir.path(), "x.csv", MeanPlan::OneCp { after: 19, delta: vec![1.5; 6] });
    for cmd in ["test-single", "test-multi"] {
        let mut a = json(&hetcp(&[cmd, "--input", &input, "--bootstrap-reps", "99", "--seed", "5"]));
        let mut b = json(&hetcp(&["--threads", "1", cmd, "--input", &input, "--bootstrap-reps", "99", "--seed", "5"]));
        assert_eq!(a["config"]["seed"], 5);
        assert!(a["timings"]["elapsed_seconds"].is_number());
        for v in [&mut a, &mut b] {
            v.as_object_mut().unwrap().remove("timings");
            v.as_object_mut().unwrap().remove("threads");
        }
        assert_eq!(a, b);
        assert_eq!(a["result"]["report"]["reject"], true);
    }
}

#[test]
fn missing_seed_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_panel(dir.path(), "x.csv", MeanPlan::Null);
    let a = json(&hetcp(&["test-single", "--input", &input, "--bootstrap-reps", "49"]));
    let seed = a["config"]["seed"].as_u64().unwrap().to_string();
    let b = json(&hetcp(&["test-single", "--input", &input, "--bootstrap-reps", "49", "--seed", &seed]));
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn estimate_finds_a_large_change() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_panel(dir.path(), "x.csv", MeanPlan::OneCp { after: 19, delta: vec![3.0; 6] });
    let v = json(&hetcp(&["estimate", "--input", &input, "--intervals", "200", "--wbs-reps", "50", "--seed", "1"]));
    assert_eq!(v["result"]["report"]["locations"], serde_json::json!([19]));
}

#[test]
fn header_row_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_panel(dir.path(), "x.csv", MeanPlan::Null);
    let with_header = dir.path().join("h.csv");
    let body = std::fs::read_to_string(&input).unwrap();
    std::fs::write(&with_header, format!("c1,c2,c3,c4,c5,c6\n{body}")).unwrap();
    let v = json(&hetcp(&["test-single", "--input", with_header.to_str().unwrap(), "--bootstrap-reps", "49", "--seed", "2"]));
    assert_eq!((v["result"]["n"].as_u64(), v["result"]["p"].as_u64()), (Some(40), Some(6)));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = dir.path().join("r.csv");
    std::fs::write(&ragged, "1,2\n3,4\n5\n").unwrap();
    let out = hetcp(&["test-single", "--input", ragged.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let input = write_panel(dir.path(), "x.csv", MeanPlan::Null);
    assert_eq!(hetcp(&["test-single", "--input", &input, "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(hetcp(&["test-single"]).status.code(), Some(2));
    assert_eq!(hetcp(&["simulate", "--scenario", "table9"]).status.code(), Some(2));
}

#[test]
fn simulate_csv_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let manifest = dir.path().join("m.json");
    let id = "table1-a1-ar05-n30-p10";
    let out = hetcp(&[
        "simulate", "--scenario", id, "--reps", "12", "--bootstrap-reps", "49", "--seed", "8",
        "--output", csv.to_str().unwrap(), "--manifest", manifest.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sc = Scenario::parse(id).unwrap();
    let lib = run_rejection_experiment(id, &sc.spec, StatKind::Single, &[0.05, 0.1], 12, 49, 8).unwrap();
    let mut want = Vec::new();
    lib.write_csv(&mut want).unwrap();
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), String::from_utf8(want).unwrap());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["config"]["seed"], 8);
    assert_eq!(m["command"], "simulate");
}

#[test]
fn diagnose_reports_p_values() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ScenarioSpec::null(400, 4, Covariance::Ar { rho: 0.0 }, Trend::A1);
    let input = dir.path().join("d.csv");
    save_csv(&sample_panel(&spec, 3).unwrap(), &input).unwrap();
    let v = json(&hetcp(&["diagnose", "--input", input.to_str().unwrap(), "--hc-draws", "500", "--seed", "4"]));
    let coords = v["result"]["report"]["coordinates"].as_array().unwrap();
    assert_eq!(coords.len(), 4);
    assert!(coords.iter().all(|c| (0.0..=1.0).contains(&c["p_value"].as_f64().unwrap())));
    let combined = &v["result"]["report"]["combined"]["p_value"];
    assert!(combined.as_f64().unwrap() < 0.05, "{combined}");
}
