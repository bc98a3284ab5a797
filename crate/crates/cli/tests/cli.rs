//! End-to-end checks of the binary: construct -> validate -> simulate round
//! trips, exit codes, determinism, and the table outputs.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const REF_ARRAY_JSON: &str = r#"{
    "rows": 4,
    "cols": 6,
    "entries": [
        ["*", 3, "*", 5, "*", 1],
        ["*", 6, 1, "*", 4, "*"],
        [3, "*", "*", 6, 2, "*"],
        [5, "*", 2, "*", "*", 4]
    ]
}"#;

fn dpda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpda"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

fn path_str(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}

#[test]
fn construct_validate_simulate_round_trip() {
    let dir = TempDir::new().unwrap();
    for kind in ["I", "II"] {
        for n in 2..=6usize {
            let out = dir.path().join(format!("{kind}_{n}.json"));
            let built = dpda(&[
                "construct",
                "--kind",
                kind,
                "--grid",
                &n.to_string(),
                "--out",
                &path_str(&out),
            ]);
            assert!(built.status.success(), "construct {kind} n={n}: {built:?}");
            assert!(out.exists());
            assert!(out.with_extension("txt").exists());

            let validated = dpda(&["validate", &path_str(&out)]);
            assert!(validated.status.success(), "validate {kind} n={n}");
            assert!(stdout(&validated).contains("valid DPDA"));

            let simulated = dpda(&[
                "simulate",
                &path_str(&out),
                "--demand",
                "random",
                "--files",
                "4",
                "--bytes",
                "512",
                "--seed",
                "11",
            ]);
            assert!(simulated.status.success(), "simulate {kind} n={n}");
            let text = stdout(&simulated);
            assert!(text.contains("users decoded"));
            assert!(text.contains("one-shot verified"));
        }
    }
}

#[test]
fn construct_from_code_matches_published_parameters() {
    let dir = TempDir::new().unwrap();
    let code = write(&dir, "gf3.json", r#"{"q":3,"rows":[[1,0,1,1],[0,1,1,2]]}"#);
    let output = dpda(&["construct", "--kind", "general", "--code", &code]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("(12,9,3,36)"));
}

#[test]
fn construct_rejects_unresolvable_designs() {
    let dir = TempDir::new().unwrap();
    // Three-class pair design: resolvable but not usable by the two-class
    // constructions.
    let design = write(
        &dir,
        "pairs.json",
        r#"{"points":["1","2","3","4"],
            "classes":[[["1","2"],["3","4"]],[["1","3"],["2","4"]],[["1","4"],["2","3"]]]}"#,
    );
    let output = dpda(&["construct", "--kind", "I", "--design", &design]);
    assert_eq!(output.status.code(), Some(1));
    // The same design works with the general construction.
    let output = dpda(&["construct", "--kind", "general", "--design", &design]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("(6,4,2,6)"));
}

#[test]
fn validate_reports_sender_failures_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"rows":2,"cols":2,"entries":[["*",1],[1,"*"]]}"#,
    );
    let output = dpda(&["validate", &bad]);
    assert_eq!(output.status.code(), Some(1));
    let text = stdout(&output);
    assert!(text.contains("valid PDA (2,2,1,1)"));
    assert!(text.contains("C4 fails for s=1"));
}

#[test]
fn validate_rejects_malformed_json_with_exit_two() {
    let dir = TempDir::new().unwrap();
    let corrupt = write(&dir, "corrupt.json", "{not json");
    let output = dpda(&["validate", &corrupt]);
    assert_eq!(output.status.code(), Some(2));
    let missing = dpda(&["validate", "/no/such/file.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn validate_accepts_reference_array_with_identity_phi() {
    let dir = TempDir::new().unwrap();
    let array = write(&dir, "ref.json", REF_ARRAY_JSON);
    let output = dpda(&["validate", &array]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("valid DPDA (6,4,2,6), phi=identity"));

    // A supplied mapping that breaks the sender condition fails with exit 1.
    let phi = write(&dir, "phi.json", "[2,1,4,3,6,5]");
    let output = dpda(&["validate", &array, "--phi", &phi]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn simulate_reference_demand_reports_exact_load() {
    let dir = TempDir::new().unwrap();
    let array = write(&dir, "ref.json", REF_ARRAY_JSON);
    let report = dir.path().join("report.json");
    let output = dpda(&[
        "simulate",
        &array,
        "--demand",
        "4,2,1,5,6,3",
        "--files",
        "6",
        "--bytes",
        "4096",
        "--seed",
        "7",
        "--out",
        &path_str(&report),
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("6 transmissions"));
    assert!(text.contains("load 3/2"));
    assert!(text.contains("6/6 users decoded"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["measured_load"], "3/2");
    assert_eq!(json["one_shot_verified"], true);
}

#[test]
fn simulate_accepts_library_spec_and_json_demand() {
    let dir = TempDir::new().unwrap();
    let array = write(&dir, "ref.json", REF_ARRAY_JSON);
    let spec = write(&dir, "lib.json", r#"{"N": 6, "B": 4096, "seed": 7}"#);
    let output = dpda(&[
        "simulate",
        &array,
        "--demand",
        "[4,2,1,5,6,3]",
        "--library",
        &spec,
    ]);
    assert!(output.status.success(), "{output:?}");
    assert!(stdout(&output).contains("load 3/2"));
    // --files and --library are mutually exclusive.
    let both = dpda(&[
        "simulate",
        &array,
        "--demand",
        "random",
        "--library",
        &spec,
        "--files",
        "3",
    ]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn simulation_reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let array = write(&dir, "ref.json", REF_ARRAY_JSON);
    let run = || {
        let output = dpda(&[
            "simulate", &array, "--demand", "random", "--files", "5", "--bytes", "777", "--seed",
            "123", "--format", "json",
        ]);
        assert!(output.status.success());
        stdout(&output)
    };
    assert_eq!(run(), run());
}

#[test]
fn bounds_classifies_constructed_array() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig3.json");
    assert!(dpda(&[
        "construct",
        "--kind",
        "I",
        "--grid",
        "3",
        "--out",
        &path_str(&out)
    ])
    .status
    .success());
    let output = dpda(&["bounds", "--array", &path_str(&out)]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("bound_jmqx=2 (met)"));
    assert!(text.contains("bound_new=4/3"));
}

#[test]
fn compare_emits_expected_tables() {
    let output = dpda(&["compare", "--n", "2"]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.starts_with("scheme,K,M_over_N,F,R"));
    assert!(text.contains("jcm,4,1/2,12,1"));
    assert!(text.contains("hypercube,4,1/2,4,2"));
    assert!(text.contains("constr-ii,4,1/2,4,1"));

    let output = dpda(&["compare", "--n", "25", "--schemes", "jcm,constrI"]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("jcm,50,1/25,2450,24"));
    assert!(text.contains("constr-i,50,1/25,625,24"));

    let output = dpda(&["compare", "--n", "2-4", "--format", "json"]);
    assert!(output.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert!(rows.as_array().unwrap().len() >= 12);

    assert_eq!(dpda(&["compare", "--n", "1"]).status.code(), Some(1));
    assert_eq!(dpda(&["compare", "--n", "x"]).status.code(), Some(2));
}

#[test]
fn export_round_trips_array_files() {
    let dir = TempDir::new().unwrap();
    let array = write(&dir, "ref.json", REF_ARRAY_JSON);
    let csv = dpda(&["export", &array, "--format", "csv"]);
    assert!(csv.status.success());
    assert!(stdout(&csv)
        .lines()
        .next()
        .unwrap()
        .contains(",1,2,3,4,5,6"));
    let text = dpda(&["export", &array, "--format", "text"]);
    assert!(stdout(&text).contains('*'));
    let json = dpda(&["export", &array, "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(doc["rows"], 4);
    assert_eq!(doc["cols"], 6);
    assert_eq!(doc["entries"][0][1], 3);
}
