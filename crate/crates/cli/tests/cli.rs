//! End-to-end tests of the binary: exit codes, determinism, schemas.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cayley-ising"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_str(out)).expect("valid JSON")
}

#[test]
fn regions_point_grid_three_ti() {
    let out = run(&["regions", "--theta", "5", "--theta1", "2"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["schema_version"], "1");
    let row = &doc["rows"][0];
    assert_eq!(row["region"], "three_translation_invariant");
    assert!((row["u1"].as_f64().unwrap() - 0.641742430504416).abs() < 1e-12);
    assert!((row["u3"].as_f64().unwrap() - 1.558257569495584).abs() < 1e-12);
}

#[test]
fn regions_point_grid_unique() {
    let out = run(&["regions", "--theta", "1", "--theta1", "1"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["rows"][0]["region"], "unique");
    assert!(doc["rows"][0]["u1"].is_null());
}

#[test]
fn regions_full_grid_has_all_three_tags() {
    let out = run(&[
        "regions",
        "--theta",
        "0.2:10",
        "--theta1",
        "0.2:4",
        "--grid",
        "100",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10_001, "header plus 10000 rows");
    for tag in [
        "three_translation_invariant",
        "three_periodic",
        "unique",
    ] {
        assert!(text.contains(tag), "missing region tag {tag}");
    }
    // LF endings only
    assert!(!text.contains('\r'));
}

#[test]
fn emissions_are_byte_identical_across_runs() {
    let args = [
        "regions", "--theta", "0.5:8", "--theta1", "0.3:3", "--grid", "20",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let args = ["classify", "--theta", "5", "--theta1", "2", "--measure", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_floats_have_17_significant_digits() {
    let out = run(&["regions", "--theta", "5", "--theta1", "2"]);
    let text = stdout_str(&out);
    // mantissa with 16 fractional digits in scientific notation
    assert!(
        text.contains("\"theta\":5.0000000000000000e0"),
        "got: {text}"
    );
}

#[test]
fn gibbs_check_consistent_field_passes_both_ways() {
    let out = run(&[
        "gibbs-check",
        "--theta",
        "5",
        "--theta1",
        "2",
        "--measure",
        "3",
        "--depth",
        "2",
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["consistency_pass"], true);
    assert_eq!(doc["recursion_pass"], true);
    assert_eq!(doc["equivalent"], true);
    assert!(doc["consistency_max_discrepancy"].as_f64().unwrap() < 1e-12);
    assert_eq!(doc["field"]["kind"], "constant");
    assert_eq!(doc["configs_checked"], 1024);
}

#[test]
fn gibbs_check_inconsistent_constant_fails_both_ways() {
    let out = run(&[
        "gibbs-check",
        "--theta",
        "5",
        "--theta1",
        "2",
        "--measure",
        "const:0.3",
        "--depth",
        "2",
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["consistency_pass"], false);
    assert_eq!(doc["recursion_pass"], false);
    assert_eq!(doc["equivalent"], true);
    assert!(doc["consistency_max_discrepancy"].as_f64().unwrap() > 1e-3);
}

#[test]
fn gibbs_check_parity_measure_at_depth_three() {
    let out = run(&[
        "gibbs-check",
        "--theta",
        "5",
        "--theta1",
        "0.5",
        "--measure",
        "12",
        "--depth",
        "3",
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["field"]["kind"], "parity");
    assert_eq!(doc["consistency_pass"], true);
    assert_eq!(doc["recursion_pass"], true);
}

#[test]
fn classify_silver_point_by_couplings() {
    // β = ln(1+√2)/2 makes θ = θ₁ = 1+√2 at J = J₁ = 1
    let out = run(&[
        "classify",
        "--J",
        "1",
        "--J1",
        "1",
        "--beta",
        "0.4406867935097715",
        "--measure",
        "2",
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    let c = &doc["classification"];
    assert_eq!(c["type_tag"], "III_lambda");
    assert!((c["delta"].as_f64().unwrap() - 0.41421356237309515).abs() < 1e-6);
    assert_eq!(c["basis"], "structured");
}

#[test]
fn classify_numerical_iii1_verdict() {
    let out = run(&[
        "classify",
        "--J",
        "1.4142135",
        "--J1",
        "1",
        "--beta",
        "1",
        "--measure",
        "2",
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    let c = &doc["classification"];
    assert_eq!(c["type_tag"], "III_1");
    assert_eq!(c["basis"], "numerical");
    assert!(c["delta"].is_null());
}

#[test]
fn classify_example_scenarios() {
    let out = run(&["classify", "--example", "3.2"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["example"], "3.2");
    assert_eq!(doc["pass"], true);
    assert!((doc["delta"].as_f64().unwrap() - 0.41421356237309515).abs() < 1e-12);
    assert!((doc["t0"].as_f64().unwrap() - 7.1287).abs() < 1e-3);
    assert_eq!(doc["ordered"]["subfactor_r"]["den"], 2);

    let out = run(&["classify", "--example", "3.1"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["pass"], true);
    let root = doc["theta_tilde"].as_f64().unwrap();
    assert!(root > 0.509 && root < 0.511);
    assert_eq!(doc["ordered"]["field_exponent"], -1);
    assert_eq!(doc["ordered"]["subfactor_r"]["den"], 4);
}

#[test]
fn zero_t_csv_schema_and_monotone_flag() {
    let out = run(&["zero-t", "--J", "1", "--J1", "1", "--beta", "1,2,4"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "beta,theta,theta1,region,u3,mu3_root_plus,mu3_sigma_plus,u1,mu1_root_minus,mu1_sigma_minus,mu2_root_plus,monotone"
    );
    assert_eq!(lines.len(), 4);
    for row in &lines[1..] {
        assert!(row.ends_with(",true"));
        assert!(row.contains(",0.5,"));
    }
}

#[test]
fn zero_t_json_format() {
    let out = run(&[
        "zero-t", "--J", "1", "--J1", "1", "--beta", "1,2", "--format", "json",
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["command"], "zero_t");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn out_flag_writes_file_and_keeps_stdout_empty() {
    let dir = std::env::temp_dir().join("cayley_ising_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("regions.json");
    let out = run(&[
        "regions",
        "--theta",
        "5",
        "--theta1",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let contents = std::fs::read_to_string(&path).unwrap();
    assert!(contents.contains("three_translation_invariant"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn exit_code_2_on_config_errors() {
    // both parameter styles at once
    let out = run(&[
        "classify", "--theta", "5", "--theta1", "2", "--J", "1", "--J1", "1", "--beta", "1",
        "--measure", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // no parameters at all
    let out = run(&["classify", "--measure", "2"]);
    assert_eq!(out.status.code(), Some(2));

    // csv for a JSON-only report
    let out = run(&[
        "classify", "--theta", "5", "--theta1", "2", "--measure", "2", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // ranged axis with degenerate grid
    let out = run(&[
        "regions", "--theta", "1:2", "--theta1", "2", "--grid", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // zero-t needs positive J1
    let out = run(&["zero-t", "--J", "1", "--J1", "-1"]);
    assert_eq!(out.status.code(), Some(2));

    // unknown flag (clap usage error)
    let out = run(&["regions", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));

    // unknown example token
    let out = run(&["classify", "--example", "9.9"]);
    assert_eq!(out.status.code(), Some(2));

    // out-of-range measure index
    let out = run(&[
        "classify", "--theta", "5", "--theta1", "2", "--measure", "5",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // malformed constant field
    let out = run(&[
        "gibbs-check", "--theta", "5", "--theta1", "2", "--measure", "const:abc",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_3_on_resource_limits() {
    let out = run(&[
        "gibbs-check",
        "--theta",
        "5",
        "--theta1",
        "2",
        "--measure",
        "2",
        "--depth",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_code_4_on_region_errors() {
    // ordered measures do not exist in the unique region
    let out = run(&[
        "classify", "--theta", "1", "--theta1", "1", "--measure", "3",
    ]);
    assert_eq!(out.status.code(), Some(4));

    // parity measure requested where no two-cycle exists
    let out = run(&[
        "gibbs-check", "--theta", "5", "--theta1", "2", "--measure", "12",
    ]);
    assert_eq!(out.status.code(), Some(4));
}
