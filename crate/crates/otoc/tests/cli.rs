use std::path::Path;
use std::process::Command;

use otoc::output::parse_csv;

fn otoc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_otoc"))
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
        "n = 2\ndeltas = [0.5]\nn_points = 3\nt_max = 1.0\nshots = 200\nreps = 3\nseed = 7\n",
    )
    .unwrap();
    path
}

#[test]
fn sweep_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("res");
    let status = otoc()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--format", "csv,json"])
        .status()
        .unwrap();
    assert!(status.success());
    let rows = parse_csv(std::fs::File::open(out.with_extension("csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| !r.is_error() && r.reps == 3 && r.shots == 200));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 9);
    assert_eq!(json["config"]["n"], 2);
}

#[test]
fn run_is_reproducible_and_needs_a_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let run = || {
        let o = otoc().args(["run", "--protocol", "ISM", "--config"]).arg(&cfg).output().unwrap();
        assert!(o.status.success());
        o.stdout
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(parse_csv(a.as_slice()).unwrap().len(), 3);

    let o = otoc().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_prints_the_exact_curve() {
    let o = otoc().args(["oracle", "--delta", "0.5"]).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("delta,beta,tau,C_exact,ReF,ImF"));
    assert_eq!(lines.count(), 15);
}

#[test]
fn bad_input_exits_with_usage_code() {
    let o = otoc().args(["sweep", "--protocol", "XYZ"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = otoc().args(["sweep", "--shots", "0"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_passes_and_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = otoc().arg("validate").arg("--out").arg(&report).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert!(!json["criteria"].as_array().unwrap().is_empty());

    let o = otoc().args(["validate", "--corrupt-alpha"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
