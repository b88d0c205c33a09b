use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, config: &str, extra: &[&str], env: &[(&str, &str)]) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_markerlab"));
    cmd.arg("--config").arg(&cfg).arg("--out").arg(dir.join("out")).args(extra);
    cmd.env_remove("MARKERLAB_GUARD_BYTES");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn golden_mean_entropy_table() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), r#"{"command":"entropy","subshift":{"preset":"golden-mean"},"entropy":{"n_min":4,"n_max":16}}"#, &[], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(d.path(), "entropy.json");
    assert_eq!(r["schema_version"], 1);
    let est = r["result"]["estimates"].as_array().unwrap();
    assert_eq!(est.len(), 13);
    assert_eq!(est[6]["count"], 144);
    let perron = r["result"]["perron_bits"].as_f64().unwrap();
    assert!((perron - 0.694_241_913_6).abs() < 1e-9);
    let csv = std::fs::read_to_string(d.path().join("out/entropy.csv")).unwrap();
    assert!(csv.starts_with("n,window_size,count,bits,exact\n4,4,8,"));
}

#[test]
fn forbidden_patterns_from_config() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"command":"entropy","subshift":{"alphabet":["0","1"],"forbidden":[{"shape":[[0],[1]],"symbols":["1","1"]}]},"entropy":{"n_min":10,"n_max":10}}"#;
    let o = run(d.path(), cfg, &[], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(report(d.path(), "entropy.json")["result"]["estimates"][0]["count"], 144);
}

#[test]
fn malformed_forbidden_shape_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), r#"{"command":"entropy","subshift":{"forbidden":[{"shape":"bad","symbols":["1"]}]}}"#, &[], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("subshift.forbidden[0].shape"), "{}", stderr(&o));
    assert!(!d.path().join("out").exists());
}

#[test]
fn other_config_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    for cfg in [
        r#"{"command":"entropy","colour":"red"}"#,
        r#"{"subshift":{"preset":"full"}}"#,
        r#"{"command":"marker","group":"Q"}"#,
        "not json",
    ] {
        assert_eq!(run(d.path(), cfg, &[], &[]).status.code(), Some(2), "{cfg}");
    }
    assert_eq!(run(d.path(), r#"{"subshift":{"preset":"full"}}"#, &["--suite", "nope"], &[]).status.code(), Some(2));
    assert_eq!(run(d.path(), r#"{"command":"entropy"}"#, &["--shards", "0"], &[]).status.code(), Some(2));
}

#[test]
fn guard_from_environment_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), r#"{"command":"marker","subshift":{"preset":"full"}}"#, &[], &[("MARKERLAB_GUARD_BYTES", "100")]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("guard"));
    let bad = run(d.path(), r#"{"command":"marker"}"#, &[], &[("MARKERLAB_GUARD_BYTES", "lots")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn marker_suite_passes_and_skip_subtraction_is_caught() {
    let d = tempfile::tempdir().unwrap();
    let ok = run(d.path(), r#"{"subshift":{"preset":"golden-mean"}}"#, &["--suite", "marker"], &[]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let cfg = r#"{"subshift":{"preset":"full"},"marker":{"s":{"interval":[0,3]},"t":{"interval":[0,8]},"k":2,"variant":"skip-subtraction"}}"#;
    let bad = run(d.path(), cfg, &["--suite", "marker"], &[]);
    assert_eq!(bad.status.code(), Some(1));
    let r = report(d.path(), "verify-marker.json");
    assert_eq!(r["pass"], false);
    let v = &r["result"]["instances"][0]["detail"]["verification"];
    assert!(v["disjoint_violations"].as_u64().unwrap() > 0);
    assert!(!v["disjoint_witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn reports_are_identical_across_shard_counts() {
    let cfg = r#"{"subshift":{"preset":"golden-mean"}}"#;
    let mut seen = None;
    for shards in ["1", "2", "8", "1"] {
        let d = tempfile::tempdir().unwrap();
        let o = run(d.path(), cfg, &["--suite", "periods", "--shards", shards], &[]);
        assert_eq!(o.status.code(), Some(0));
        let bytes = std::fs::read(d.path().join("out/verify-periods.json")).unwrap();
        match &seen {
            None => seen = Some(bytes),
            Some(b) => assert!(b == &bytes, "shards={shards} changed the report"),
        }
    }
}

#[test]
fn cascade_needs_the_override_for_small_parameters() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"command":"cascade","cascade":{"k":2,"s":{"interval":[0,3]},"t":{"interval":[0,6]},"stages":2,"n":8}}"#;
    assert_eq!(run(d.path(), cfg, &[], &[]).status.code(), Some(2));
    let o = run(d.path(), cfg, &["--unsafe-override"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(d.path(), "cascade.json");
    assert_eq!(r["result"]["stages"][0]["count"], 256);
    let ladder = std::fs::read_to_string(d.path().join("out/ladder.csv")).unwrap();
    assert_eq!(ladder.lines().count(), 4);
    assert!(ladder.starts_with("m,count,bits,density,gap_bound,drop\n0,256,"));
}

#[test]
fn certified_cascade_from_epsilon_hits_the_guard() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), r#"{"command":"cascade","cascade":{"epsilon":0.5}}"#, &[], &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn quasitile_centers_are_written() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"command":"quasitile","group":"Z2","quasitile":{"tiles":[{"box":[3,3]}],"delta":"1/4","n":12}}"#;
    let o = run(d.path(), cfg, &[], &[]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)), "{}", stderr(&o));
    let r = report(d.path(), "quasitile.json");
    assert_eq!(r["result"]["center_check"]["levels_disjoint"], true);
    let csv = std::fs::read_to_string(d.path().join("out/centers.csv")).unwrap();
    assert!(csv.starts_with("tile,x0,x1\n"));
}

#[test]
fn config_echo_omits_shards_and_applies_seed() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), r#"{"command":"entropy","entropy":{"n_min":1,"n_max":2}}"#, &["--shards", "4", "--seed", "9"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(d.path(), "entropy.json");
    assert!(r["config"].get("shards").is_none());
    assert_eq!(r["config"]["seed"], 9);
}
