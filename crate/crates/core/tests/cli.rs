//! Golden runs of the command-line binary: exit codes, report shape and
//! determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn paracontact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paracontact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("paracontact-cli-{}-{name}", std::process::id()))
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn statuses(report: &Value) -> Vec<(String, String)> {
    report["checks"]
        .as_array()
        .expect("checks array")
        .iter()
        .map(|c| {
            (
                c["id"].as_str().unwrap().to_string(),
                c["status"].as_str().unwrap().to_string(),
            )
        })
        .collect()
}

#[test]
fn e1_full_suite_exits_zero() {
    let out = paracontact(&["check", "E1", "--seed", "7", "--points", "100"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["model"], "E1");
    assert_eq!(r["seed"], 7);
    for (id, status) in statuses(&r) {
        if id.ends_with("-printed") {
            assert!(status == "printed-form-mismatch" || status == "pass", "{id}: {status}");
        } else {
            assert!(status == "pass" || status == "vacuous", "{id}: {status}");
        }
    }
    for c in r["checks"].as_array().unwrap() {
        assert!(!c["anchor"].as_str().unwrap().is_empty());
    }
}

#[test]
fn e2_lie_suite_reports_two_printed_mismatches() {
    let out = paracontact(&["check", "E2", "--suite", "lie", "--points", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let mismatches: Vec<_> = statuses(&report(&out))
        .into_iter()
        .filter(|(_, s)| s == "printed-form-mismatch")
        .map(|(id, _)| id)
        .collect();
    assert_eq!(mismatches, ["lie.c11-printed", "lie.fundamental-printed"]);
}

#[test]
fn n1_structure_suite_exits_one() {
    let out = paracontact(&["check", "N1", "--suite", "structure", "--points", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let phi_squared = statuses(&report(&out))
        .into_iter()
        .find(|(id, _)| id == "axiom.phi-squared")
        .unwrap();
    assert_eq!(phi_squared.1, "fail");
}

#[test]
fn malformed_manifest_exits_two_with_position() {
    let path = scratch("malformed.json");
    std::fs::write(&path, "{\n  \"name\": \"m\",\n  \"dim\": 2,,\n}\n").unwrap();
    let out = paracontact(&["check", path.to_str().unwrap()]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3") && stderr.contains("column"), "{stderr}");
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(paracontact(&["check", "NOPE"]).status.code(), Some(2));
    assert_eq!(paracontact(&["check", "E1", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(paracontact(&["hypersurface", "E1"]).status.code(), Some(2));
    assert_eq!(paracontact(&["synthetic", "--epsilon", "0.5"]).status.code(), Some(2));
    assert_eq!(paracontact(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["check", "E3b", "--points", "30", "--seed", "11"];
    let first = paracontact(&args);
    let second = paracontact(&args);
    assert_eq!(first.status.code(), second.status.code());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn different_seeds_sample_different_points() {
    let a = report(&paracontact(&["check", "E1", "--suite", "structure", "--points", "5", "--seed", "1"]));
    let b = report(&paracontact(&["check", "E1", "--suite", "structure", "--points", "5", "--seed", "2"]));
    assert_ne!(a["seed"], b["seed"]);
    assert_eq!(statuses(&a), statuses(&b));
}

#[test]
fn list_models_names_every_builtin() {
    let out = paracontact(&["list-models"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().filter_map(|l| l.split_whitespace().next()).collect();
    assert_eq!(names, ["E1", "E1-5", "E2", "E2-5", "N1", "F0", "E3a", "E3b", "S1"]);
}

#[test]
fn exported_manifest_round_trips_through_the_cli() {
    for name in ["E2", "E3b"] {
        let path = scratch(&format!("{name}.json"));
        let out = paracontact(&["export-model", name, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let original = std::fs::read_to_string(&path).unwrap();
        let again = paracontact(&["export-model", path.to_str().unwrap()]);
        assert_eq!(String::from_utf8(again.stdout).unwrap(), original);

        let from_file = paracontact(&["check", path.to_str().unwrap(), "--suite", "structure", "--points", "10"]);
        let builtin = paracontact(&["check", name, "--suite", "structure", "--points", "10"]);
        let _ = std::fs::remove_file(&path);
        assert_eq!(from_file.stdout, builtin.stdout);
    }
}

#[test]
fn text_format_and_out_file() {
    let path = scratch("report.txt");
    let out = paracontact(&[
        "check", "E1", "--suite", "sasakian", "--points", "5", "--format", "text", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let _ = std::fs::remove_file(&path);
    assert!(text.starts_with("model E1  suite sasakian"));
    assert!(text.contains("sasakian.nabla-phi"));
}

#[test]
fn hypersurface_subcommand_selects_parts() {
    let out = paracontact(&["hypersurface", "E3b", "--suite", "gauss", "--points", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let ids: Vec<String> = statuses(&report(&out)).into_iter().map(|(id, _)| id).collect();
    assert!(ids.contains(&"hypersurface.gauss-equation".to_string()));
    assert!(!ids.iter().any(|id| id.starts_with("characterization.")));

    let sphere = paracontact(&["hypersurface", "S1", "--points", "10"]);
    assert_eq!(sphere.status.code(), Some(1));
}

#[test]
fn synthetic_subcommand_flags_printed_constant() {
    let out = paracontact(&["synthetic", "--epsilon", "-1", "--dim", "5", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let st = statuses(&report(&out));
    let get = |id: &str| st.iter().find(|(i, _)| i == id).unwrap().1.clone();
    assert_eq!(get("synthetic.k-value"), "pass");
    assert_eq!(get("synthetic.k-value-printed"), "printed-form-mismatch");

    let perturbed = paracontact(&["synthetic", "--trials", "10", "--perturb", "0.01"]);
    assert_eq!(perturbed.status.code(), Some(1));
}
