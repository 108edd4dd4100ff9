use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_randcompare"));
    c.env_remove("RANDCOMPARE_SEED");
    c
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn repo_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn assert_schema(schema_file: &str, instance: &Value) {
    let text = std::fs::read_to_string(repo_file(&format!("schema/{schema_file}"))).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}");
}

fn report<'a>(json: &'a Value, test: &str) -> &'a Value {
    json["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["test"] == test)
        .unwrap_or_else(|| panic!("no report for {test}"))
}

#[test]
fn cell_phone_fisher_and_neyman() {
    let data = repo_file("data/cellphone.csv");
    let out = run(&[
        "test", "--data", data.to_str().unwrap(), "--tests", "fisher-rand,neyman-rand", "--design", "crd",
        "--mc", "1000000", "--seed", "7", "--format", "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_schema("test_report.schema.json", &json);
    assert!((json["d3"].as_f64().unwrap() - 51.59).abs() < 0.005);
    assert!((json["z3"].as_f64().unwrap() - 2.67).abs() < 0.005);
    let fisher = report(&json, "fisher-rand");
    assert!((fisher["p_value"].as_f64().unwrap() - 0.0074).abs() < 0.001);
    assert_eq!(fisher["p_value_kind"], "monte_carlo");
    assert_eq!(fisher["mc_draws"], 1_000_000);
    let neyman = report(&json, "neyman-rand");
    assert!((neyman["p_value"].as_f64().unwrap() - 0.0075).abs() < 0.0003);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let data = repo_file("data/cellphone.csv");
    let args = ["test", "--data", data.to_str().unwrap(), "--mc", "20000", "--seed", "5", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let data = repo_file("data/cellphone.csv");
    let args = ["test", "--data", data.to_str().unwrap(), "--tests", "fisher-rand", "--mc", "5000", "--format", "json"];
    let env = bin().args(args).env("RANDCOMPARE_SEED", "99").output().unwrap();
    let flag = run(&[&args[..], &["--seed", "99"]].concat());
    assert_eq!(env.stdout, flag.stdout);
    let default = run(&args);
    assert_eq!(stdout_json(&default)["engine"]["seed"], 11);
}

#[test]
fn all_tests_on_toy_file() {
    let out = run(&["test", "--data", fixture("toy.csv").to_str().unwrap(), "--tests", "all", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_schema("test_report.schema.json", &json);
    let tests: Vec<&str> = json["reports"].as_array().unwrap().iter().map(|r| r["test"].as_str().unwrap()).collect();
    assert_eq!(
        tests,
        ["fisher-rand", "neyman-rand", "permutation", "wilcoxon", "welch", "pooled", "neyman-selection"]
    );
    let notices = json["notices"].as_array().unwrap();
    assert_eq!(notices.len(), 1);
    assert_eq!(notices[0]["test"], "fisher-selection");
    assert_eq!(notices[0]["exit_code"], 3);
    // Six equally likely splits; the observed one and its mirror are the
    // most extreme.
    assert_eq!(report(&json, "fisher-rand")["p_value"].as_f64().unwrap(), 2.0 / 6.0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("fisher-selection"));
}

#[test]
fn table_output_leads_with_statistics() {
    let data = repo_file("data/cellphone.csv");
    let out = run(&["test", "--data", data.to_str().unwrap(), "--mc", "2000"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let d3 = text.find("D3 = 51.5938").expect("D3 line");
    let z3 = text.find("Z3 = 2.6728").expect("Z3 line");
    let first_test = text.find("fisher-rand ").unwrap();
    assert!(d3 < z3 && z3 < first_test);
}

#[test]
fn csv_output() {
    let out = run(&["test", "--data", fixture("toy.csv").to_str().unwrap(), "--tests", "welch,pooled", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "test,hypothesis,statistic,p_value,p_value_kind,mc_stderr,reject,degenerate");
    assert!(lines.next().unwrap().starts_with("welch,EUP,"));
    assert!(lines.next().unwrap().starts_with("pooled,EUP,"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "test", "--data", fixture("toy.csv").to_str().unwrap(), "--tests", "welch", "--format", "json",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["reports"][0]["test"], "welch");
}

#[test]
fn data_errors_exit_2_with_line_numbers() {
    let out = run(&["test", "--data", fixture("duplicate.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("`a`"), "{err}");

    let out = run(&["test", "--data", fixture("bad_number.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = run(&["validate", "--data", fixture("empty_arm.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["validate", "--data", fixture("duplicate.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`a`"));
}

#[test]
fn unsupported_design_exits_3() {
    let toy = fixture("toy.csv");
    let out = run(&["test", "--data", toy.to_str().unwrap(), "--tests", "fisher-selection"]);
    assert_eq!(out.status.code(), Some(3));
    let design = fixture("explicit_design.json");
    let out = run(&["test", "--data", toy.to_str().unwrap(), "--tests", "neyman-rand", "--design", design.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let zero = fixture("zero_inclusion_design.json");
    let out = run(&["test", "--data", toy.to_str().unwrap(), "--tests", "fisher-rand", "--design", zero.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn explicit_design_runs_fisher() {
    let design = fixture("explicit_design.json");
    let text = std::fs::read_to_string(&design).unwrap();
    assert_schema("design.schema.json", &serde_json::from_str(&text).unwrap());
    let out = run(&[
        "test", "--data", fixture("toy.csv").to_str().unwrap(), "--tests", "fisher-rand", "--design",
        design.to_str().unwrap(), "--engine", "exact", "--format", "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["design"], "explicit");
    // The observed split (1, 1, 2, 2) and its mirror have |D| = 2; the
    // alternating splits have |D| = 0.5.
    assert_eq!(report(&json, "fisher-rand")["p_value"].as_f64().unwrap(), 0.5);
}

#[test]
fn exact_engine_refuses_large_support() {
    let data = repo_file("data/cellphone.csv");
    let out = run(&["test", "--data", data.to_str().unwrap(), "--tests", "fisher-rand", "--engine", "exact"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn fisher_exact_on_binary_data() {
    let out = run(&["test", "--data", fixture("binary.csv").to_str().unwrap(), "--tests", "all", "--format", "json"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_schema("test_report.schema.json", &json);
    // 2 of 3 against 1 of 3: every table is as likely or less.
    assert!((report(&json, "fisher-exact")["p_value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(json["notices"].as_array().unwrap().iter().any(|n| n["test"] == "fisher-selection"));
}

#[test]
fn usage_errors() {
    let toy = fixture("toy.csv");
    let out = run(&["test", "--data", toy.to_str().unwrap(), "--tests", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["test", "--data", toy.to_str().unwrap(), "--mc", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["test", "--data", toy.to_str().unwrap(), "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn validate_reports_arm_summaries() {
    let data = repo_file("data/cellphone.csv");
    let out = run(&["validate", "--data", data.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["arm1"]["n"], 32);
    assert_eq!(json["arm2"]["n"], 32);
    assert!((json["difference"].as_f64().unwrap() - 51.59).abs() < 0.005);
    assert!(json["arm1"]["variance"].as_f64().unwrap() > 0.0);
}

#[test]
fn unknown_scenario_lists_known_ids() {
    let out = run(&["simulate", "t9.sc1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("t3.sc1") && err.contains("t6.sc6"), "{err}");
}

#[test]
fn simulate_json_validates_and_is_deterministic() {
    let args = ["simulate", "t3.sc2", "--replicates", "100", "--mc", "1000", "--format", "json", "--threads", "2"];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let json = stdout_json(&a);
    assert_schema("simulation.schema.json", &json);
    let est = json["runs"][0]["estimates"].as_array().unwrap();
    assert_eq!(est.len(), 12);
    assert_eq!(run(&args).stdout, a.stdout);
}

#[test]
fn simulate_binary_marks_wilcoxon_na() {
    let out = run(&["simulate", "t3.sc6", "--replicates", "100", "--mc", "1000", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let wilcoxon = text.lines().find(|l| l.contains(",wilcoxon,")).unwrap();
    assert!(wilcoxon.ends_with(",100,,,"), "{wilcoxon}");
}

#[test]
fn simulate_from_config_file() {
    let out = run(&[
        "simulate", "--config", fixture("scenario.toml").to_str().unwrap(), "--replicates", "100", "--mc", "1000",
        "--rows", "process", "--format", "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_schema("simulation.schema.json", &json);
    assert_eq!(json["runs"][0]["scenario"], "shifted-normal");
    assert!(json["runs"][0]["estimates"].as_array().unwrap().iter().all(|e| e["row"] == "process"));
}

#[test]
fn fewer_replicates_agree_within_three_standard_errors() {
    let get = |reps: &str| {
        let out = run(&["simulate", "t4.sc1", "--replicates", reps, "--rows", "process", "--tests", "welch", "--format", "json"]);
        assert!(out.status.success());
        let json = stdout_json(&out);
        let e = &json["runs"][0]["estimates"][0];
        (e["rejection_rate"].as_f64().unwrap(), e["mc_stderr"].as_f64().unwrap())
    };
    let (small, small_se) = get("100");
    let (large, _) = get("1000");
    assert!((small - large).abs() <= 3.0 * small_se, "{small} +- {small_se} vs {large}");
}

#[test]
fn scenarios_lists_registry() {
    let out = run(&["scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 26);
}
