use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const FAST: [&str; 4] = ["--grid-t", "32", "--grid-g", "32"];

fn dimdrop(args: &[&str], env_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dimdrop"));
    cmd.args(args).env_remove("DIMDROP_OUT_DIR");
    if let Some(dir) = env_dir {
        cmd.env("DIMDROP_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a json report")
}

fn with_fast<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().copied().chain(FAST).collect()
}

#[test]
fn exit_code_tracks_the_verdict() {
    let good = dimdrop(&with_fast(&["verify-elementary", "--n", "3", "--base", "circle:1"]), None);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(report(&good)["pass"], true);

    // No sampled endpoint is that exact.
    let strict = dimdrop(&with_fast(&["verify-elementary", "--n", "3", "--tol", "1e-30"]), None);
    assert_eq!(strict.status.code(), Some(2));
    assert_eq!(report(&strict)["pass"], false);
}

#[test]
fn bad_requests_exit_with_config_error() {
    for args in [
        &["certify-diagram", "--k", "2", "--m", "4", "--n", "6"][..],
        &["verify-elementary", "--n", "0"],
        &["verify-elementary", "--n", "2", "--grid-t", "31"],
        &["verify-elementary", "--n", "2", "--base", "torus"],
        &["verify-elementary", "--n", "2", "--unknown"],
    ] {
        let out = dimdrop(args, None);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"seed": 5, "T": 16, "G": 16, "tol": 1e-8}"#).unwrap();
    let path = config.to_str().unwrap();
    let out = dimdrop(&["verify-elementary", "--n", "2", "--config", path, "--seed", "9"], None);
    assert_eq!(out.status.code(), Some(0));
    let cfg = &report(&out)["config"];
    assert_eq!(cfg["seed"], 9);
    assert_eq!(cfg["T"], 16);
    assert_eq!(cfg["tol"], 1e-8);
    assert_eq!(cfg["boundary_tol"], 1e-9);

    std::fs::write(&config, r#"{"seed": 5, "resolution": 16}"#).unwrap();
    assert_eq!(dimdrop(&["verify-elementary", "--n", "2", "--config", path], None).status.code(), Some(3));
}

#[test]
fn reports_go_to_the_environment_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dimdrop(&with_fast(&["verify-elementary", "--n", "2", "--format", "csv"]), Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("verify-elementary.csv")).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.lines().any(|l| l == "pass,true"));

    // An explicit path wins over the directory.
    let explicit = dir.path().join("nested/report.json");
    let out =
        dimdrop(&with_fast(&["verify-elementary", "--n", "2", "--out", explicit.to_str().unwrap()]), Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    assert!(explicit.exists());
    assert!(!dir.path().join("verify-elementary.json").exists());
}

#[test]
fn dumped_fixtures_reproduce_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("fixture.json");
    let fixture = fixture.to_str().unwrap();
    for command in ["demo-lemma34", "demo-theorem39", "demo-corollary36"] {
        let generated = dimdrop(&with_fast(&[command, "--dump-fixture", fixture]), None);
        assert_eq!(generated.status.code(), Some(0), "{command}");
        // A different seed is ignored once the inputs come from the file.
        let loaded = dimdrop(&with_fast(&[command, "--fixture", fixture, "--seed", "99"]), None);
        assert_eq!(loaded.status.code(), Some(0), "{command}");
        assert_eq!(report(&generated)["report"], report(&loaded)["report"], "{command}");
        assert_eq!(report(&loaded)["parameters"]["fixture_input"], true);
    }
    std::fs::write(fixture, "{\"m\": 2}").unwrap();
    assert_eq!(dimdrop(&with_fast(&["demo-lemma34", "--fixture", fixture]), None).status.code(), Some(3));
}

#[test]
fn negative_control_is_reported() {
    let out = dimdrop(&with_fast(&["demo-lemma34", "--winding", "2"]), None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["report"]["corner_class"], 2);
    assert_eq!(r["report"]["negative_control"]["corner_class"], 2);
    assert_eq!(r["report"]["negative_control"]["valid_element"], false);
    assert_eq!(r["report"]["result"]["correction"], "enabled");
}
