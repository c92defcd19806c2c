use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"{"format": 4, "n_channels": 1, "n_trials": 2, "n_payload_blocks": 2, "osnr_db": [10.0, 13.0]}"#;

fn ftnsim(args: &[&str], cfg: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ftnsim"));
    cmd.args(args).env_remove("FTNSIM_JOBS");
    if let Some(path) = cfg {
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("cfg.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn selftest_exits_zero() {
    let out = ftnsim(&["selftest"], None);
    assert!(out.status.success());
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn missing_config_file_exits_one() {
    let out = ftnsim(&["ber-sweep"], Some(Path::new("/nonexistent/cfg.json")));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_key_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\n  \"formt\": 4\n}");
    let out = ftnsim(&["ber-sweep"], Some(&cfg));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("formt") && err.contains("line 2"), "{err}");
}

#[test]
fn invalid_value_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"format": 8}"#);
    assert_eq!(ftnsim(&["ber-sweep"], Some(&cfg)).status.code(), Some(1));
}

#[test]
fn bad_flag_exits_one_and_help_exits_zero() {
    assert_eq!(ftnsim(&["ber-sweep", "--bogus"], None).status.code(), Some(1));
    assert_eq!(ftnsim(&["--help"], None).status.code(), Some(0));
}

#[test]
fn stdout_csv_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let piped = ftnsim(&["ber-sweep", "--jobs", "2"], Some(&cfg));
    assert!(piped.status.success());
    let csv = dir.path().join("r.csv");
    let out = ftnsim(&["ber-sweep", "--jobs", "1", "--out", csv.to_str().unwrap()], Some(&cfg));
    assert!(out.status.success());
    assert_eq!(std::fs::read(&csv).unwrap(), piped.stdout);
    let sidecar: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(sidecar["config"]["format"], 4);
    assert!(sidecar["config_hash"].as_str().is_some_and(|h| h.len() == 64));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = ftnsim(&["ber-sweep", "--seed", "1"], Some(&cfg)).stdout;
    let b = ftnsim(&["ber-sweep", "--seed", "2"], Some(&cfg)).stdout;
    assert_ne!(a, b);
    assert!(String::from_utf8_lossy(&b).contains("seed=2"));
}

#[test]
fn derive_thp_writes_loadable_filters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let path = dir.path().join("thp.json");
    let out = ftnsim(&["derive-thp", "--out", path.to_str().unwrap()], Some(&cfg));
    assert!(out.status.success());
    let filters = ftnsim::thp::ThpFilters::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!filters.fbf_taps.is_empty());

    let nyq = write_config(dir.path(), r#"{"mode": "nyquist"}"#);
    assert_eq!(ftnsim(&["derive-thp"], Some(&nyq)).status.code(), Some(1));
}
