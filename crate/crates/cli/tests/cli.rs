use std::process::{Command, Output};

fn polycubes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polycubes")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<String> {
    text.lines().skip(2).map(str::to_string).collect()
}

#[test]
fn g1_at_four() {
    let o = polycubes(&["g1", "--n", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# {\"schema_version\":1,\"n\":4,\"dim\":3,\"mode\":\"proper\",\"provenance\":\"formula\""));
    assert_eq!(rows(&text), ["15,8", "16,24"]);
}

#[test]
fn g2_below_six_is_enumerated() {
    let o = polycubes(&["g2", "--n", "5", "--reproducible"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("\"provenance\":\"enumeration\""));
    assert!(String::from_utf8_lossy(&o.stderr).contains("enumerating"));
    assert_eq!(polycubes(&["g2", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn g2_formula_matches_enumeration_at_six() {
    let formula = polycubes(&["g2", "--n", "6"]);
    let counted = polycubes(&["enumerate", "--n", "6", "--d", "4", "--proper"]);
    assert!(formula.status.success() && counted.status.success());
    assert_eq!(rows(&stdout(&formula)), rows(&stdout(&counted)));
}

#[test]
fn enumerate_small_lattice() {
    let o = polycubes(&["enumerate", "--n", "2", "--d", "3"]);
    assert!(o.status.success());
    assert_eq!(rows(&stdout(&o)), ["10,3"]);
    let o = polycubes(&["enumerate", "--n", "4", "--i", "2", "--proper"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("\"mode\":\"proper\""));
    let total: u64 = rows(&text).iter().map(|r| r.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    // 19 tetrominoes, minus the two straight ones
    assert_eq!(total, 17);
}

#[test]
fn invalid_input_and_budget_exit_codes() {
    assert_eq!(polycubes(&["g1", "--n", "0"]).status.code(), Some(2));
    assert_eq!(polycubes(&["enumerate", "--n", "3", "--d", "0"]).status.code(), Some(2));
    assert_eq!(polycubes(&["density", "--n", "3", "--d", "2", "--p", "3/2"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_polycubes"))
        .args(["enumerate", "--n", "9", "--d", "4"])
        .env("POLYCUBES_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn parallel_output_is_byte_identical() {
    let args = |jobs: &'static str| ["enumerate", "--n", "7", "--d", "4", "--reproducible", "--jobs", jobs];
    let one = polycubes(&args("1"));
    let eight = polycubes(&args("8"));
    assert!(one.status.success() && eight.status.success());
    assert_eq!(one.stdout, eight.stdout);
}

#[test]
fn out_file_and_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let ck = dir.path().join("ck");
    let args = [
        "enumerate",
        "--n",
        "6",
        "--d",
        "3",
        "--jobs",
        "2",
        "--checkpoint-dir",
        ck.to_str().unwrap(),
        "--format",
        "json",
        "--reproducible",
        "--out",
        out.to_str().unwrap(),
    ];
    assert!(polycubes(&args).status.success());
    let first = std::fs::read_to_string(&out).unwrap();
    assert!(first.starts_with('{'));
    assert!(std::fs::read_dir(&ck).unwrap().count() > 1);
    assert!(polycubes(&args).status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
}

#[test]
fn verify_and_patterns_pass() {
    let o = polycubes(&["verify", "--n", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("[FAIL]"));
    let o = polycubes(&["verify-patterns", "--n", "6"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["agree"], true);
}

#[test]
fn family_and_density() {
    let o = polycubes(&["family", "--n", "4", "--d", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("A_d(n)=86"));
    let o = polycubes(&["density", "--n", "3", "--d", "2", "--p", "1/2"]);
    assert_eq!(stdout(&o).trim(), "5/1024");
}

#[test]
fn calibration_singles_out_frozen_weights() {
    let o = polycubes(&["calibrate-g2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("SURVIVES")).count(), 1);
    assert!(text.contains("candidates=72 survivors=1"));
}
