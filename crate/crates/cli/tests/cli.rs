use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn veronese(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_veronese"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn gen(dir: &Path, args: &[&str]) -> PathBuf {
    let mut all = vec!["gen", "--out-dir", dir.to_str().unwrap()];
    all.extend_from_slice(args);
    let out = veronese(&all);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let entry: Value = serde_json::from_slice(&out.stdout).unwrap();
    dir.join(entry["curve"].as_str().unwrap())
}

fn flat(dir: &Path, n: &str) -> PathBuf {
    gen(dir, &["--family", "flat", "--k", "1", "--n", n])
}

fn perturbed(dir: &Path) -> PathBuf {
    gen(
        dir,
        &["--family", "perturbed", "--k", "1", "--n", "2", "--points", "0,1", "--beta", "0,x2,0", "--pencil", "1"],
    )
}

fn without_volatile(mut v: Value) -> Value {
    fn strip(v: &mut Value) {
        if let Value::Object(map) = v {
            map.remove("volatile");
            map.values_mut().for_each(strip);
        }
    }
    strip(&mut v);
    v
}

#[test]
fn check_flat_curve_full() {
    let dir = tempfile::tempdir().unwrap();
    let c = flat(dir.path(), "2");
    let out = veronese(&["check", c.to_str().unwrap(), "--mode", "full"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["report"]["verdict"], "integrable-everywhere");
    assert_eq!(report["seed"], 0);
}

#[test]
fn sparse_check_of_perturbed_curve_fails() {
    let dir = tempfile::tempdir().unwrap();
    let c = perturbed(dir.path());
    let out = veronese(&["check", c.to_str().unwrap(), "--mode", "sparse", "--points", "0,1,inf,2,3"]);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let checked = report["report"]["checked"].as_array().unwrap();
    let failing: Vec<&str> = checked
        .iter()
        .filter(|c| c["integrable"] == false)
        .map(|c| c["point"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["2", "3"]);
}

#[test]
fn sparse_check_needs_n_plus_3_points() {
    let dir = tempfile::tempdir().unwrap();
    let c = perturbed(dir.path());
    let out = veronese(&["check", c.to_str().unwrap(), "--mode", "sparse", "--points", "0,1,inf,2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("n+3"));
}

#[test]
fn other_modes_and_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let c = perturbed(dir.path());
    let path = c.to_str().unwrap();
    assert_eq!(code(&veronese(&["check", path, "--mode", "naive", "--points", "0,1,2,3,4,5,6"])), 1);
    assert_eq!(code(&veronese(&["check", path, "--mode", "random", "--seed", "3"])), 1);
    assert_eq!(code(&veronese(&["check", path, "--mode", "listed", "--points", "0,1,inf"])), 0);
    assert_eq!(code(&veronese(&["check", path, "--mode", "listed"])), 2);
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&veronese(&["check", garbage.to_str().unwrap()])), 2);
    assert_eq!(code(&veronese(&["check", "/nonexistent/curve.json"])), 2);
    assert_eq!(code(&veronese(&["check", path, "--mode", "bogus"])), 2);
}

#[test]
fn coframe_failure_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let c = flat(dir.path(), "1");
    let mut curve: Value = serde_json::from_str(&std::fs::read_to_string(&c).unwrap()).unwrap();
    // make the second coefficient equal to the first
    let first = curve["pencils"][0][0].clone();
    curve["pencils"][0][1] = first;
    let bad = dir.path().join("degenerate.json");
    std::fs::write(&bad, serde_json::to_string(&curve).unwrap()).unwrap();
    let out = veronese(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("coframe"));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let c = perturbed(dir.path());
    let run = || {
        let out = veronese(&["theorem", c.to_str().unwrap(), "--trials", "20", "--seed", "9"]);
        assert_eq!(code(&out), 0);
        without_volatile(serde_json::from_slice(&out.stdout).unwrap())
    };
    let first = run();
    assert_eq!(first, run());
    assert_eq!(first["report"]["disagreements"].as_array().unwrap().len(), 0);
    assert_eq!(first["report"]["full_verdict"], "not-integrable-at-queried-points");
}

#[test]
fn theorem_on_integrable_curves() {
    let dir = tempfile::tempdir().unwrap();
    let c = flat(dir.path(), "2");
    let out = veronese(&["theorem", c.to_str().unwrap(), "--trials", "50"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["report"]["sparse_passes"], 50);
    let c = gen(
        dir.path(),
        &["--family", "rescaled", "--base", "pullback", "--k", "1", "--n", "2", "--seed", "4"],
    );
    assert_eq!(code(&veronese(&["theorem", c.to_str().unwrap(), "--trials", "50"])), 0);
}

#[test]
fn complexify_flat_curve() {
    let dir = tempfile::tempdir().unwrap();
    let c = flat(dir.path(), "1");
    let report_path = dir.path().join("report.json");
    let out = veronese(&[
        "complexify",
        c.to_str().unwrap(),
        "--anchors",
        "0,1,2",
        "--sample-ts",
        "0,1,-1,5,inf",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let r = &report["report"];
    assert_eq!(r["rank_F"], 1);
    for item in ["1", "2", "3", "4"] {
        let checks = r["items"][item].as_array().unwrap();
        assert_eq!(checks.len(), 5);
        assert!(checks.iter().all(|c| c["ok"] == true));
    }
    assert_eq!(r["items"]["1"][4]["t"], "inf");
}

#[test]
fn complexify_pullback_in_adapted_chart() {
    let dir = tempfile::tempdir().unwrap();
    let c = gen(dir.path(), &["--family", "pullback", "--k", "1", "--n", "2", "--map", "x0+x1*x2,x1,x2"]);
    let out = veronese(&["complexify", c.to_str().unwrap(), "--anchors", "0,1,2,3", "--adapted"]);
    assert_eq!(code(&out), 2, "no manifest to read the adapted chart from");
    let manifest = c.to_str().unwrap().replace(".curve.json", ".manifest.json");
    let out = veronese(&["complexify", c.to_str().unwrap(), "--anchors", "0,1,2,3", "--adapted", "--manifest", &manifest]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let mut curve: Value = serde_json::from_str(&std::fs::read_to_string(&c).unwrap()).unwrap();
    curve["manifest"] = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    let full = dir.path().join("with-manifest.json");
    std::fs::write(&full, serde_json::to_string(&curve).unwrap()).unwrap();
    let out = veronese(&["complexify", full.to_str().unwrap(), "--anchors", "0,1,2,3", "--adapted"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn complexify_errors() {
    let dir = tempfile::tempdir().unwrap();
    let c = perturbed(dir.path());
    let out = veronese(&["complexify", c.to_str().unwrap(), "--anchors", "0,1,2,3"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("anchor 2"));
    assert_eq!(code(&veronese(&["complexify", c.to_str().unwrap()])), 2);
}

#[test]
fn gen_outputs_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let c = flat(dir.path(), "2");
    let curve: Value = serde_json::from_str(&std::fs::read_to_string(&c).unwrap()).unwrap();
    assert_eq!(curve["variables"], serde_json::json!(["x0", "x1", "x2"]));

    let p = gen(dir.path(), &["--family", "perturbed", "--k", "1", "--n", "2", "--points", "0,1", "--seed", "7"]);
    let manifest = p.to_str().unwrap().replace(".curve.json", ".manifest.json");
    let m: Value = serde_json::from_str(&std::fs::read_to_string(manifest).unwrap()).unwrap();
    assert!(m["expected_locus"].is_object() || m["expected_locus"] == "ALL");

    let bad = veronese(&[
        "gen", "--family", "pullback", "--k", "1", "--n", "2", "--map", "x0,x1+x0,x2", "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&bad), 2);
    let bad = veronese(&["gen", "--family", "spiral", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&bad), 2);

    let again = gen(dir.path(), &["--family", "perturbed", "--k", "1", "--n", "2", "--points", "0,1", "--seed", "7"]);
    assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn corpus_index_lists_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let out = veronese(&["corpus", "--seed", "2", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let index: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("index.json")).unwrap()).unwrap();
    let entries = index.as_array().unwrap();
    assert!(entries.len() >= 100);
    assert_eq!(entries[0]["curve_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn worker_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_veronese"))
        .args(["check", "/nonexistent"])
        .env("VERONESE_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("VERONESE_WORKERS"));
}
