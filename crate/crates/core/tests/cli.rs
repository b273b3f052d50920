use std::path::Path;
use std::process::{Command, Output};

fn ittm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ittm")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(ittm(&["clock", "emit", "--target", "w^^2"]).status.code(), Some(3));
    assert_eq!(ittm(&["run"]).status.code(), Some(3));
    assert_eq!(ittm(&["run", "--sample", "nope"]).status.code(), Some(3));
    assert_eq!(ittm(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(ittm(&["--help"]).status.code(), Some(0));
}

#[test]
fn run_reports_halt_and_traces() {
    let dir = std::env::temp_dir().join(format!("ittm-cli-run-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let trace = dir.join("t.jsonl");
    let o = ittm(&["run", "--sample", "identity", "--input", "1101(0)", "--trace", path(&trace), "--limits-only"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "halted");
    assert_eq!(v["output"][2], "1101(0)");
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert!(lines.lines().count() >= 1);
    for l in lines.lines() {
        serde_json::from_str::<serde_json::Value>(l).unwrap();
    }

    let o = ittm(&["run", "--sample", "loop", "--budget-steps", "200", "--max-level", "0", "--total-steps", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stretch_halts_at_omega_squared_plus_one() {
    let dir = std::env::temp_dir().join(format!("ittm-cli-stretch-{}", std::process::id()));
    let o = ittm(&["compile", "stretch", "--out", path(&dir)]);
    assert_eq!(o.status.code(), Some(0));
    let o = ittm(&["run", "--program", path(&dir.join("stretch.itm")), "--input", "10(0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["stage"], "w^2+1");
}

#[test]
fn compile_then_cosim_and_chain() {
    let dir = std::env::temp_dir().join(format!("ittm-cli-cosim-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("p.itm");
    let o = ittm(&["sample", "every-other"]);
    std::fs::write(&p, &o.stdout).unwrap();

    assert_eq!(ittm(&["compile", "simulate", "--program", path(&p), "--out", path(&dir)]).status.code(), Some(0));
    let o = ittm(&["analyze", "cosim", "--p", path(&p), "--q", path(&dir.join("simulate.itm")), "--mode", "simulate"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["pass"], true);

    // the wrong comparison mode is a contract failure
    let o = ittm(&["analyze", "cosim", "--p", path(&p), "--q", path(&dir.join("simulate.itm")), "--mode", "onehat"]);
    assert_eq!(o.status.code(), Some(1));

    let pl = dir.join("pl");
    assert_eq!(ittm(&["compile", "pipeline", "--program", path(&p), "--out", path(&pl)]).status.code(), Some(0));
    let o = ittm(&["chain", "--manifest", path(&pl.join("manifest.json")), "--input", "1101(0)"]);
    assert_eq!(o.status.code(), Some(0));
    let direct = json(&ittm(&["run", "--program", path(&p), "--input", "1101(0)"]));
    assert_eq!(json(&o)["output"], direct["output"][2]);
}

#[test]
fn clock_emit_and_verify() {
    let dir = std::env::temp_dir().join(format!("ittm-cli-clock-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("c.itm");
    let o = ittm(&["clock", "emit", "--target", "w*2+3", "--out", path(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(ittm(&["clock", "verify", "--program", path(&f), "--target", "w*2+3"]).status.code(), Some(0));
    let o = ittm(&["clock", "verify", "--program", path(&f), "--target", "w*2+4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(ittm(&["clock", "emit", "--target", "w*2", "--variant", "onetape-limit"]).status.code(), Some(3));
}

#[test]
fn analyze_verbs_respond() {
    let o = ittm(&["analyze", "halting-strings", "--sample", "identity", "--maxlen", "3"]);
    assert_eq!(o.status.code(), Some(3));
    let o = ittm(&["analyze", "halting-strings", "--sample", "queue-1", "--maxlen", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 14);
    let o = ittm(&["analyze", "survey", "--count", "5", "--format", "json", "--budget-steps", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 5);
    let o = ittm(&["analyze", "stretch-collision", "--sample", "queue-1", "--m", "5", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}
