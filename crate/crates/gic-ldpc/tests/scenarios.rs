use std::path::{Path, PathBuf};

use gic_ldpc::pipeline::{run_scenario, RunOptions, StageSet};
use gic_ldpc::Scenario;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

#[test]
fn shipped_scenarios_load() {
    let dir = scenario("");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let s = Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            s.initial_codes().unwrap();
            n += 1;
        }
    }
    assert!(n >= 4);
}

#[test]
fn preloaded_sets_certify_on_their_channels() {
    let tmp = tempfile::tempdir().unwrap();
    for (file, messages) in [("strong_certify.toml", 2), ("weak_certify.toml", 3)] {
        let mut s = Scenario::load(&scenario(file)).unwrap();
        assert!(s.fully_preloaded());
        assert_eq!(s.preloaded.messages().count(), messages);
        s.file.certify.threshold_bracket_db = None;
        let opts = RunOptions {
            stages: StageSet::only("certify"),
            out_dir: Some(tmp.path().to_path_buf()),
            ..RunOptions::default()
        };
        let summary = run_scenario(&s, &opts).unwrap();
        assert_eq!(summary.admissible, Some(true), "{file}");
        assert!(summary.out_dir.join("admissibility.json").is_file());
    }
}
