use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn tasep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tasep"))
        .args(args)
        .env_remove("TASEP_DATA_DIR")
        .output()
        .unwrap()
}

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn wolf_validates_with_its_sheet() {
    let o = tasep(&["character", "validate", &data("data/characters/wolf_of_wallstreet.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Social bonus 5, Manipulation 11, valid"), "{}", stdout(&o));
}

#[test]
fn invalid_character_exits_1_with_rule_names() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("greedy.json");
    std::fs::write(
        &file,
        r#"{"name":"Greedy","invested":{"design":7,"forging":6,"analysis":6,"programming":6},"proficiencies":[]}"#,
    )
    .unwrap();
    let o = tasep(&["character", "validate", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("per-skill cap"), "{text}");
    assert!(text.contains("budget"), "{text}");

    let o = tasep(&["--format", "json", "character", "validate", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["rule"], "budget");
}

#[test]
fn malformed_and_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.json");
    std::fs::write(&file, "{ nope").unwrap();
    let o = tasep(&["character", "validate", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());

    let o = tasep(&["scenario", "lint", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not/here.json"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(tasep(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        tasep(&["probability", "table", "--skill-range", "9..3"]).status.code(),
        Some(2)
    );
}

#[test]
fn balance_report_states_the_gap() {
    let o = tasep(&["balance", "report"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("unified threshold: 11"));
    assert!(text.contains("87.75 % vs 90 %"));

    let v = json(&tasep(&["--format", "json", "balance", "report"]));
    assert_eq!(v["unifiedThreshold"], 11);
    assert_eq!(v["masterCombined"]["numerator"], 351);
    assert_eq!(v["masterTargetMet"], false);
}

#[test]
fn probability_table_rows() {
    let v = json(&tasep(&[
        "probability", "table", "--skill-range", "0..11", "--threshold", "18", "--format", "json",
    ]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0]["probability"]["numerator"], 2);
    assert_eq!(rows[11]["probability"]["numerator"], 13);
    let text = stdout(&tasep(&["probability", "table", "--skill-range", "11..11", "--proficient"]));
    assert!(text.contains("351/400 = 0.8775"), "{text}");
}

#[test]
fn shipped_scenarios_lint_and_verify() {
    for f in ["data/scenarios/giveaway.json", "data/scenarios/theft_of_data.json"] {
        let o = tasep(&["scenario", "lint", &data(f)]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let o = tasep(&["scenario", "verify", &data(f)]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let v = json(&tasep(&["--format", "json", "scenario", "verify", &data("data/scenarios/giveaway.json")]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["completedObjectives"][0], "malware-deployed");
}

#[test]
fn broken_scenario_fails_lint() {
    let dir = tempfile::tempdir().unwrap();
    let mut s: Value =
        serde_json::from_str(&std::fs::read_to_string(data("data/scenarios/giveaway.json")).unwrap()).unwrap();
    s["intendedSolution"][3]["completes"] = Value::Null;
    let file = dir.path().join("s.json");
    std::fs::write(&file, s.to_string()).unwrap();
    let o = tasep(&["scenario", "lint", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("error["));
    assert_eq!(tasep(&["scenario", "verify", file.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn simulate_reports_exact_and_estimate() {
    let v = json(&tasep(&[
        "simulate", "--skill", "0", "--threshold", "18", "--trials", "100000", "--seed", "7", "--format", "json",
    ]));
    assert_eq!(v["exact"]["numerator"], 2);
    assert_eq!(v["estimate"]["trials"], 100000);
    assert!(v["deviationInStandardErrors"].as_f64().unwrap() <= 4.0);
}

#[test]
fn replay_golden_log() {
    let log = data("tests/golden/demo_session.jsonl");
    let o = tasep(&["session", "replay", &log]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("status: closed"), "{text}");
    assert!(text.contains("version: 60"), "{text}");

    let v = json(&tasep(&["--format", "json", "session", "replay", &log]));
    assert_eq!(v["status"], "closed");

    // a corrupted sequence number is reported by number
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(&log).unwrap().replacen("{\"seq\":5,", "{\"seq\":55,", 1);
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, text).unwrap();
    let o = tasep(&["session", "replay", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sequence number 55"));
}

#[test]
fn replay_by_session_id_uses_data_dir() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("sessions")).unwrap();
    std::fs::copy(data("tests/golden/demo_session.jsonl"), dir.path().join("sessions/abc.jsonl")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tasep"))
        .args(["session", "replay", "abc"])
        .env("TASEP_DATA_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}
