use std::path::{Path, PathBuf};

use hsq_core::fixtures::{chain, grushin, grushin_k};
use hsq_core::io::{read_json, read_system, to_json_pretty, HarnessFile, SystemFile};
use hsq_core::Error;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
fn system_fixtures_round_trip() {
    let dir = fixtures();
    for (file, sys) in [
        ("grushin.json", grushin()),
        ("grushin_k.json", grushin_k(2)),
        ("grushin_k3.json", grushin_k(3)),
        ("chain3.json", chain(3)),
        ("chain.json", chain(4)),
    ] {
        let loaded = read_system(&dir.join(file)).unwrap();
        assert_eq!(loaded, sys, "{file}");
        let text = to_json_pretty(&SystemFile::from_system(&sys)).unwrap();
        let back: SystemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_system().unwrap(), sys);
    }
}

#[test]
fn parse_errors_carry_position() {
    let dir = tempfile_dir();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{\n  \"schema\": 1,\n  \"n\": oops\n}\n").unwrap();
    match read_json::<SystemFile>(&path) {
        Err(Error::FileParse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let msg = read_json::<SystemFile>(&path).unwrap_err().to_string();
    assert!(msg.contains("broken.json") && msg.contains("line 3"), "{msg}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn harness_config_resolves_paths() {
    let dir = fixtures();
    let cfg: HarnessFile = read_json(&dir.join("grushin_harness.json")).unwrap();
    let resolved = cfg.resolved(&dir).unwrap();
    let sys = grushin();
    assert_eq!(resolved.family_members(&sys).unwrap().len(), 18);
    let again = resolved.resolved(Path::new("/nonexistent")).unwrap();
    assert_eq!(to_json_pretty(&again).unwrap(), to_json_pretty(&resolved).unwrap());
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hsq-io-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
