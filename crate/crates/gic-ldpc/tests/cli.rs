use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_gic-ldpc");

const REGULAR_36: &str = r#"{"lambda": {"3": 1.0}, "rho": {"6": 1.0}}"#;

/// Strong symmetric channel, both users decoding two regular (3,6) codes.
fn small_scenario(dir: &Path, extra: &str) -> PathBuf {
    std::fs::write(dir.join("c36.json"), REGULAR_36).unwrap();
    let text = format!(
        r#"
name = "small"
seed = 42
out_dir = "out"

[channel]
h11 = 1.0
h12 = 1.4142135623730951
h21 = 1.4142135623730951
h22 = 1.0
n0 = 0.5

[codes]
w1 = "c36.json"
w2 = "c36.json"

[density]
population = 4000
min_population = 2000
rounds_max = 120

[certify]
enabled = true

[region]
alpha_values = [0.0]
ts_steps = 8

[ber]
enabled = true
block_length = 600
points_db = [3.0]
max_blocks = 32
rounds_max = 60
traced_blocks = 1
{extra}
"#
    );
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).trim().to_string(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn missing_seed_exits_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    let p = small_scenario(tmp.path(), "");
    let text = std::fs::read_to_string(&p).unwrap().replace("seed = 42\n", "");
    std::fs::write(&p, text).unwrap();
    let (code, _, err) = run(&["run", "--scenario", p.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("seed"), "{err}");
}

#[test]
fn unknown_key_and_bad_grid_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let p = small_scenario(tmp.path(), "[bogus]\nx = 1\n");
    assert_eq!(run(&["run", "--scenario", p.to_str().unwrap()]).0, 2);
    let p = small_scenario(tmp.path(), "");
    let (code, _, _) = run(&["region", "--scenario", p.to_str().unwrap(), "--grid", "0:-1:1"]);
    assert_eq!(code, 2);
}

#[test]
fn dry_run_writes_only_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let p = small_scenario(tmp.path(), "");
    let (code, out, err) = run(&["run", "--dry-run", "--scenario", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let dir = PathBuf::from(out);
    assert!(dir.ends_with("out/small/run-001"), "{}", dir.display());
    let files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(files, vec!["manifest.json"]);
    let m = manifest(&dir);
    assert_eq!(m["seed"], 42);
    assert_eq!(m["status"], "dry-run");
    assert!(m["version"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
}

#[test]
fn reruns_produce_identical_csv_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let p = small_scenario(tmp.path(), "");
    let mut dirs = Vec::new();
    for _ in 0..2 {
        let (code, out, err) = run(&["run", "--jobs", "2", "--scenario", p.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        dirs.push(PathBuf::from(out));
    }
    assert_ne!(dirs[0], dirs[1]);
    let m = manifest(&dirs[0]);
    assert_eq!(m["status"], "ok");
    let artifacts: Vec<String> = m["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_str().unwrap().into())
        .collect();
    for want in [
        "config.toml",
        "admissibility.json",
        "mi_trajectory.csv",
        "region.csv",
        "ber.csv",
        "trace.csv",
        "codes/w1.alist",
    ] {
        assert!(artifacts.iter().any(|a| a == want), "missing {want} in {artifacts:?}");
    }
    let mut compared = 0;
    for a in &artifacts {
        if a.ends_with(".csv") || a.ends_with(".alist") || a.ends_with(".json") {
            let x = std::fs::read(dirs[0].join(a)).unwrap();
            let y = std::fs::read(dirs[1].join(a)).unwrap();
            assert!(x == y, "{a} differs between reruns");
            compared += 1;
        }
    }
    assert!(compared >= 6);
    // worker count must not change results
    let (code, out, _) = run(&["run", "--jobs", "1", "--scenario", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    let a = std::fs::read(dirs[0].join("ber.csv")).unwrap();
    assert_eq!(a, std::fs::read(PathBuf::from(out).join("ber.csv")).unwrap());
}

#[test]
fn exported_alist_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let p = small_scenario(tmp.path(), "");
    let (code, out, err) = run(&["ber", "--scenario", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let h = gic_ldpc::formats::read_alist_file(&PathBuf::from(&out).join("codes/w2.alist")).unwrap();
    assert_eq!(h.n(), 600);
    assert!(h.variable_degrees().iter().all(|&d| d == 3));
    let ber = std::fs::read_to_string(PathBuf::from(out).join("ber.csv")).unwrap();
    assert!(ber.starts_with("point_db,message,blocks,bits,errors,ber,worst,claim_below_target"));
}

#[test]
fn failed_stage_exits_3_and_keeps_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let p = small_scenario(tmp.path(), "");
    // far below threshold: certification must fail
    let text = std::fs::read_to_string(&p).unwrap().replace("n0 = 0.5", "n0 = 8.0");
    std::fs::write(&p, text).unwrap();
    let (code, _, err) = run(&["evaluate", "--scenario", p.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("certify"), "{err}");
    let m = manifest(&tmp.path().join("out/small/run-001"));
    assert!(m["status"].as_str().unwrap().starts_with("failed"));
    assert_eq!(m["summary"]["admissible"], false);
}

#[test]
fn seed_and_out_flags_override_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let p = small_scenario(tmp.path(), "");
    let other = tmp.path().join("elsewhere");
    let (code, out, err) = run(&[
        "region",
        "--scenario",
        p.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        other.to_str().unwrap(),
        "--grid",
        "0:0.5:1",
    ]);
    assert_eq!(code, 0, "{err}");
    let dir = PathBuf::from(out);
    assert!(dir.starts_with(&other));
    assert_eq!(manifest(&dir)["seed"], 7);
    let csv = std::fs::read_to_string(dir.join("region.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("naive-ts-bpsk,")), "{csv}");
}
