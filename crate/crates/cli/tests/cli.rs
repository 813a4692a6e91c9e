use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn shtuka(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shtuka")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

#[test]
fn tower_level_two() {
    let out = shtuka(&["tower", "--q", "3", "--level", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["degree"], 18);
    assert_eq!(v["generator_valuations"], serde_json::json!(["1/2", "1/6", "1/18"]));
    assert_eq!(v["carlitz_residual_zero"], true);
    assert_eq!(v["value_group_index"], 18);
    assert_eq!((v["zeta_prec"].as_i64(), v["z_prec"].as_i64()), (Some(32), Some(3)));
}

#[test]
fn tower_level_zero_and_even_q() {
    let out = shtuka(&["tower", "--q", "3", "--level", "0"]);
    assert_eq!(json(&out)["degree"], 2);
    let out = shtuka(&["tower", "--q", "4", "--level", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd prime power"));
}

#[test]
fn openness_points() {
    let v = json(&shtuka(&["openness", "--q", "3", "--d", "2", "--level", "2"]));
    let r = &v["points"][0]["report"];
    assert_eq!((r["open_in_full"].as_bool(), r["index"].as_u64()), (Some(true), Some(2)));
    let v = json(&shtuka(&["openness", "--q", "3", "--d", "3", "--level", "2"]));
    assert_eq!(v["points"][0]["report"]["open_in_full"], false);
}

#[test]
fn openness_sweep_is_ordered_and_deterministic() {
    let args = ["openness", "--q", "3", "--d", "1..9", "--level", "3"];
    let first = shtuka(&args);
    assert_eq!(first.status.code(), Some(0));
    let v = json(&first);
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 9);
    let ds: Vec<u64> = points.iter().map(|p| p["d"].as_u64().unwrap()).collect();
    assert_eq!(ds, (1..=9).collect::<Vec<_>>());
    assert_eq!(first.stdout, shtuka(&args).stdout);
}

#[test]
fn openness_csv_has_one_row_per_report() {
    let out = shtuka(&["openness", "--q", "5", "--d", "1,2,5", "--level", "0..2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("q_v,p,n,d,"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn openness_size_limit_flags_partial_output() {
    let out = shtuka(&["openness", "--q", "3", "--d", "2", "--level", "1..3", "--cap", "20"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["complete"], false);
    assert!(v["points"][0]["report"].is_object());
    assert!(v["points"][2]["error"].as_str().unwrap().contains("cap"));
}

#[test]
fn motive_carlitz_places() {
    let v = json(&shtuka(&["motive", &data("carlitz_t.json")]));
    assert_eq!((v["rank"].as_u64(), v["dim"].as_i64()), (Some(1), Some(1)));
    assert_eq!(v["criterion"]["verdict"], "Open");
    let v = json(&shtuka(&["motive", &data("carlitz_t2p1.toml")]));
    assert_eq!((v["dim"].as_i64(), v["place"]["f_v"].as_u64()), (Some(1), Some(2)));
    assert_eq!(v["criterion"]["verdict"], "Open");
    let v = json(&shtuka(&["motive", &data("carlitz_cubed.json")]));
    assert_eq!(v["dim"], 3);
    assert_eq!(v["criterion"]["verdict"], "NotOpen");
}

#[test]
fn motive_parse_errors_name_the_location() {
    let dir = std::env::temp_dir().join(format!("shtuka-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\n  \"q\": 3,\n  \"r\": 1,\n  \"T\": [[[1]]],\n  \"v\": [0, 1],\n  \"bogus\": 1\n}\n").unwrap();
    let out = shtuka(&["motive", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bogus") && err.contains("line"), "{err}");
    let reducible = dir.join("reducible.toml");
    std::fs::write(&reducible, "q = 3\nr = 1\nv = [2, 0, 1]\nT = [[[{ theta = [0, -1] }, 1]]]\n").unwrap();
    let out = shtuka(&["motive", reducible.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reducible"));
}

#[test]
fn selftest_passes() {
    let out = shtuka(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS") && !text.contains("FAIL"));
    let out = shtuka(&["selftest", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}
