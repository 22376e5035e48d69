use std::path::Path;
use std::process::{Command, Output};

fn mmult(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmult"))
        .args(args)
        .env("MMULT_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn write_ones_table(dir: &Path) -> String {
    let entries: Vec<String> = (1..=8).map(|n| format!(r#"{{"index":[{n}],"s":0,"value":1.0}}"#)).collect();
    let path = dir.join("ones.json");
    std::fs::write(&path, format!(r#"{{"channels":1,"entries":[{}]}}"#, entries.join(","))).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn fnorm_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let table = write_ones_table(dir.path());
    let out = mmult(&["fnorm", "--table", &table], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fnorm.json")).unwrap()).unwrap();
    let value = report["body"]["results"]["value"].as_f64().unwrap();
    assert!((value - 18f64.sqrt()).abs() < 1e-12);
    assert_eq!(report["body"]["results"]["maximizing_a"], 3);
    assert!(report["timing"]["wall_clock_seconds"].is_number());
    let csv = std::fs::read_to_string(dir.path().join("fnorm.csv")).unwrap();
    assert!(csv.starts_with("item,quantity,value\n"));
    assert!(csv.contains("fnorm,maximizing_a,3"));
    assert!(!dir.path().join("fnorm.json.tmp").exists());
}

#[test]
fn inline_table_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = mmult(&["fnorm", "--table", r#"{"channels":1,"entries":[{"index":[1],"s":0,"value":2}]}"#], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = mmult(&["fnorm", "--table", "{not json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_command_exits_3_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = mmult(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Usage") && err.contains("frobnicate"), "{err}");
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("dup.json");
    std::fs::write(&bad, r#"{"channels":1,"entries":[{"index":[1],"s":0,"value":1},{"index":[1],"s":0,"value":2}]}"#)
        .unwrap();
    for args in [
        vec!["fnorm", "--table", bad.to_str().unwrap()],
        vec!["fnorm"],
        vec!["equiv-report", "--equivalence", "nonsense"],
        vec!["dg-solve", "--trials", "many"],
        vec![],
    ] {
        let out = mmult(&args, dir.path());
        assert_eq!(out.status.code(), Some(3), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn failed_assertion_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // The sampled L1 / square-function ratios sit near 1, so a cap of 1.0001 fails.
    let out = mmult(&["equiv-report", "--equivalence", "square-function-vs-l1", "--trials", "20", "--cap", "1.0001"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert!(dir.path().join("equiv-report.json").exists());
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"command":"prop1-verify","group":"cyclic","N":2,"depth":1,"seed":1,
            "table":{"channels":1,"entries":[{"grade":1,"index":[0],"s":0,"value":1.0},{"grade":1,"index":[1],"s":0,"value":1.0}]}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("custom");
    let out = mmult(&["--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("prop1-verify.json")).unwrap()).unwrap();
    let inst = &report["body"]["results"]["instances"][0];
    assert!((inst["formula"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((inst["optimal_character"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn help_and_version_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    for flag in ["--help", "--version"] {
        assert_eq!(mmult(&[flag], dir.path()).status.code(), Some(0));
    }
}
