use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use cpa_core::{decompose, CpaExpr};

fn cpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpa")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn count_fixtures() {
    let fig1 = cpa(&["count", &fixture("fig1.json")]);
    assert!(fig1.status.success());
    assert!(stdout(&fig1).starts_with("n=4 pieces=5 cells="));
    assert!(stdout(&fig1).trim_end().ends_with("bounds ok"));

    let leaf = cpa(&["count", &fixture("leaf.json")]);
    assert!(stdout(&leaf).starts_with("n=1 pieces=1 "));
}

#[test]
fn count_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let run = cpa(&["count", &fixture("fig1.json"), "--json", "-o", out.to_str().unwrap()]);
    assert!(run.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&run)).unwrap();
    assert_eq!(doc["bounds"]["pieces"], 5);
    assert_eq!(doc["bounds"]["n"], 4);
    assert_eq!(fs::read_to_string(&out).unwrap().trim(), stdout(&run).trim());
}

#[test]
fn malformed_input_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"d\": 2,\n \"expr\": {\"op\": \"leaf\", }").unwrap();
    let run = cpa(&["count", bad.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 2"));

    let missing = cpa(&["count", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn construct_sawtooth_and_lift() {
    let dir = tempfile::tempdir().unwrap();
    let saw = dir.path().join("saw.json");
    assert!(cpa(&["construct", "sawtooth", "--m", "3", "--zmin", "-1/2", "--zmax", "3", "-o", saw.to_str().unwrap()]).status.success());
    let e = CpaExpr::from_json(&fs::read_to_string(&saw).unwrap()).unwrap();
    assert_eq!(decompose(&e).unwrap().maximal_piece_count(), 6);

    let lifted = dir.path().join("lift.json");
    assert!(cpa(&["construct", "lift", "--m", "2", "-o", lifted.to_str().unwrap()]).status.success());
    let cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("lift.json.cert.json")).unwrap()).unwrap();
    let certified = cert["certified_pieces_lower_bound"].as_u64().unwrap();
    assert!(certified >= 8);
    let e = CpaExpr::from_json(&fs::read_to_string(&lifted).unwrap()).unwrap();
    assert!(decompose(&e).unwrap().maximal_piece_count() as u64 >= certified);
}

#[test]
fn construct_thm8_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    assert!(cpa(&["construct", "thm8-family", "--d", "2", "--n", "12", "-o", out.to_str().unwrap()]).status.success());
    let e = CpaExpr::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    let cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t.json.cert.json")).unwrap()).unwrap();
    let dec = decompose(&e).unwrap();
    assert_eq!(e.dim(), 2);
    assert!(dec.maximal_piece_count() as u64 >= cert["certified_pieces_lower_bound"].as_u64().unwrap());
    assert!(e.leaf_components().len() as u64 <= cert["component_budget"].as_u64().unwrap());
}

#[test]
fn invalid_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let out = out.to_str().unwrap();
    assert_eq!(cpa(&["construct", "sawtooth", "--m", "0", "-o", out]).status.code(), Some(2));
    assert_eq!(cpa(&["construct", "sawtooth", "--zmin", "2", "--zmax", "1", "-o", out]).status.code(), Some(2));
    assert_eq!(cpa(&["construct", "thm8-family", "--n", "3", "-o", out]).status.code(), Some(2));
    assert_eq!(cpa(&["sweep", "paths", "--range", "three", "-o", out]).status.code(), Some(2));
    assert_eq!(cpa(&["construct", "pyramid", "-o", out]).status.code(), Some(2));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.csv");
    assert!(cpa(&["sweep", "lift", "--range", "4..3", "-o", out.to_str().unwrap()]).status.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), "n,d,pieces,cells,lemma1,thm2,ok,ms\n");
}

#[test]
fn path_sweep_lengths_never_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("paths.csv");
    let svg = dir.path().join("paths.svg");
    let run = cpa(&["sweep", "paths", "--range", "3..10", "-o", out.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert!(run.status.success());
    let mut reader = csv::Reader::from_path(&out).unwrap();
    let pieces: Vec<u64> = reader.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(pieces.len(), 8);
    assert!(pieces.windows(2).all(|w| w[0] <= w[1]), "{pieces:?}");
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn verify_fig1_passes() {
    let run = cpa(&["verify", "fig1"]);
    assert!(run.status.success());
    assert!(stdout(&run).contains("4 checks, 0 failed"));
}
