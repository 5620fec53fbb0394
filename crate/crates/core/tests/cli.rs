use std::path::Path;
use std::process::{Command, Output};

fn tablegrid(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tablegrid"))
        .args(args)
        .current_dir(cwd)
        .env_remove("TABLEGRID_CONFIG")
        .output()
        .unwrap()
}

#[test]
fn synth_run_evaluate_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let o = tablegrid(&["synth", "--out", "fx", "--count", "4", "--seed", "11"], dir);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.join("fx/fixture_0003.pgm").exists());
    assert!(dir.join("fx/fixture_0003_t0.json").exists());
    assert!(dir.join("fx/corpus.json").exists());

    let o = tablegrid(&["run", "fx", "--out", "pred", "--jobs", "2"], dir);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.join("pred/manifest.json").exists());

    let o = tablegrid(&["evaluate", "--pred", "pred", "--gt", "fx", "--out", "report.json"], dir);
    assert!(o.status.success());
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.starts_with("Team"), "{table}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["per_threshold"][0]["f1"], 1.0);
}

#[test]
fn failed_page_sets_exit_status() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("bad.pgm"), b"P5\n4 4\n255\n").unwrap();
    let o = tablegrid(&["run", "bad.pgm", "--out", "o"], dir);
    assert_eq!(o.status.code(), Some(1));
    let o = tablegrid(&["run", "bad.pgm", "--mode", "sideways"], dir);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert!(tablegrid(&["synth", "--out", "fx", "--count", "1"], dir).status.success());
    std::fs::write(dir.join("cfg.toml"), "tsr_mode = \"bordered\"\nv_line_len = 25\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tablegrid"))
        .args(["run", "fx/fixture_0000.pgm", "--out", "o", "--no-deskew"])
        .env("TABLEGRID_CONFIG", "cfg.toml")
        .current_dir(dir)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["tsr_mode"], "bordered");
    assert_eq!(m["config"]["v_line_len"], 25);
    assert_eq!(m["config"]["deskew"], false);
}

#[test]
fn single_stage_utilities() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert!(tablegrid(&["synth", "--out", "fx", "--count", "1"], dir).status.success());
    let o = tablegrid(&["deskew", "fx/fixture_0000.pgm", "d.pgm"], dir);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("applied"));
    assert!(tablegrid(&["normalize", "fx/fixture_0000.pgm", "n.pgm"], dir).status.success());
    let n = tablegrid::raster::load_gray(dir.join("n.pgm")).unwrap();
    assert!(n.data().iter().all(|&v| v == 0 || v == 255));
}
