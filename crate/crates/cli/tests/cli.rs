//! End-to-end runs of the `minkperi` binary.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minkperi"))
}

fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets").join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn small_optimizer(dir: &Path, m: f64) -> PathBuf {
    let cfg = serde_json::json!({
        "m": m, "alpha": 0.5, "r": 0.1, "seed": 3, "restarts": 4,
        "schedule": { "initial_temperature": 1e-3, "decay": 0.98, "steps": 150 }
    });
    let path = dir.join(format!("opt-{m}.json"));
    fs::write(&path, cfg.to_string()).unwrap();
    path
}

#[test]
fn measure_disk_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin()
        .args(["measure", preset("shapes/disk256.json").to_str().unwrap()])
        .args(["--r", "0.5", "--alpha", "1", "--out"])
        .arg(dir.path()));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert!((v["per_r"].as_f64().unwrap() - TAU).abs() / TAU < 1e-3);
    assert!((v["phi"].as_f64().unwrap() - 16.0 * PI / 3.0).abs() / (16.0 * PI / 3.0) < 1e-3);
    assert_eq!(v["per_r_method"], "exact");
    assert_eq!(v["riesz_diameter_check"]["passed"], true);
    let manifest = json_file(&dir.path().join("manifest.json"));
    assert_eq!(manifest["input_hashes"].as_array().unwrap().len(), 1);
    assert!(dir.path().join("measure.csv").exists());
}

#[test]
fn measure_square_closed_form() {
    let o = run(bin().args(["measure", preset("shapes/unit_square.json").to_str().unwrap(), "--r", "0.1"]));
    assert_eq!(code(&o), 0);
    let per = stdout_json(&o)["per_r"].as_f64().unwrap();
    assert!((per - (4.0 + (PI - 4.0) / 20.0)).abs() < 1e-12);
}

#[test]
fn measure_grid_and_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let disk = minkperi::Grid::rasterize_ball(&[0.0, 0.0], 1.0, 0.01).unwrap();
    let path = dir.path().join("disk.pgm");
    minkperi::grid::pgm::write_grid(&disk, fs::File::create(&path).unwrap()).unwrap();
    let o = run(bin().arg("measure").arg(&path).args(["--r", "0.2", "--alpha", "1"]));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["per_r_method"], "grid");
    assert!((v["per_r"].as_f64().unwrap() - TAU).abs() / TAU < 0.03);

    let empty = minkperi::Grid::empty(0.02, vec![0.0, 0.0], vec![8, 8]).unwrap();
    let path = dir.path().join("empty.pgm");
    minkperi::grid::pgm::write_grid(&empty, fs::File::create(&path).unwrap()).unwrap();
    let o = run(bin().arg("measure").arg(&path));
    assert_eq!(code(&o), 2);
    let v = stdout_json(&o);
    assert_eq!(v["volume"], 0.0);
    assert_eq!(v["phi"], 0.0);
}

#[test]
fn measure_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"n\": 2, \"vertices\": [[0, 0], [1, 1]]}").unwrap();
    assert_eq!(code(&run(bin().arg("measure").arg(&path))), 2);
    assert_eq!(code(&run(bin().args(["measure", "/nonexistent/shape.json"]))), 2);
}

#[test]
fn measure_resolution_guard() {
    let dir = tempfile::tempdir().unwrap();
    let disk = minkperi::Grid::rasterize_ball(&[0.0, 0.0], 1.0, 0.1).unwrap();
    let path = dir.path().join("coarse.pgm");
    minkperi::grid::pgm::write_grid(&disk, fs::File::create(&path).unwrap()).unwrap();
    assert_eq!(code(&run(bin().arg("measure").arg(&path).args(["--r", "0.1"]))), 3);
}

#[test]
fn verify_iso_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin().args(["verify", "iso", "--trials", "20", "--seed", "42", "--out"]).arg(dir.path()));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json_file(&dir.path().join("summary.json"));
    assert_eq!(summary["family"], "random-hulls");
    assert_eq!(summary["trials"], 20);
    assert_eq!(summary["violations"], 0);
    assert!(summary["min_constant"].as_f64().unwrap() > 0.0);
    let scatter = fs::read_to_string(dir.path().join("scatter.csv")).unwrap();
    assert!(scatter.starts_with("id,x,y"));
    assert_eq!(scatter.lines().count(), 21);
    assert_eq!(json_file(&dir.path().join("manifest.json"))["seed"], 42);
}

#[test]
fn verify_negative_tolerance_fails_with_replayable_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("adversarial.json");
    fs::write(&cfg, r#"{"family": "boxes", "trials": 3, "tolerance": -1.0}"#).unwrap();
    let out = dir.path().join("out");
    let o = run(bin().args(["verify", "iso", "--config"]).arg(&cfg).arg("--out").arg(&out));
    assert_eq!(code(&o), 1);
    let dumps: Vec<_> = fs::read_dir(out.join("violations")).unwrap().collect();
    assert_eq!(dumps.len(), 3);
    // The dumped shapes measure again.
    let first = dumps[0].as_ref().unwrap().path();
    assert_eq!(code(&run(bin().arg("measure").arg(first))), 0);
}

#[test]
fn verify_bounds_on_thin_rectangles() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("thin.json");
    fs::write(&cfg, r#"{"family": "thin-rectangles", "trials": 20}"#).unwrap();
    let o = run(bin().args(["verify", "bounds", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("out")));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_rejects_unknown_config_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.json");
    fs::write(&cfg, r#"{"trails": 3}"#).unwrap();
    let o = run(bin().args(["verify", "iso", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("out")));
    assert_eq!(code(&o), 2);
}

#[test]
fn optimize_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_optimizer(dir.path(), 1e-3);
    let outs: Vec<PathBuf> = (0..2).map(|k| dir.path().join(format!("run{k}"))).collect();
    for out in &outs {
        let o = run(bin().args(["optimize", "--config"]).arg(&cfg).arg("--out").arg(out));
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["shape.json", "trace.ndjson", "result.json"] {
        assert_eq!(fs::read(outs[0].join(file)).unwrap(), fs::read(outs[1].join(file)).unwrap(), "{file}");
    }
    let result = json_file(&outs[0].join("result.json"));
    assert_eq!(result["ball"], true);
    assert!(result["total"].as_f64().unwrap() <= result["ball_total"].as_f64().unwrap() + 1e-3);
    let shape = json_file(&outs[0].join("shape.json"));
    assert_eq!(shape["n"], 2);
}

#[test]
fn optimize_large_m_elongates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_optimizer(dir.path(), 1e4);
    let o = run(bin().args(["optimize", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("out")));
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let lambdas = v["lambdas"].as_array().unwrap();
    assert!(lambdas[1].as_f64().unwrap() > 100.0 * lambdas[0].as_f64().unwrap());
    assert_eq!(v["ball"], false);
}

#[test]
fn optimize_rejects_r_outside_unit_interval() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin().args(["optimize", "--r", "1.5", "--out"]).arg(dir.path()));
    assert_eq!(code(&o), 2);
}

#[test]
fn sweep_guards_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin().args(["sweep", "--mode", "large", "--alpha", "1.5", "--out"]).arg(dir.path()));
    assert_eq!(code(&o), 2);
}

#[test]
fn sweep_large_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    let body = serde_json::json!({
        "m_list": [1e2, 1e3, 1e4],
        "optimizer": { "restarts": 4, "schedule": { "steps": 300 } }
    });
    fs::write(&cfg, body.to_string()).unwrap();
    let out = dir.path().join("out");
    let o = run(bin().args(["sweep", "--mode", "large", "--config"]).arg(&cfg).arg("--out").arg(&out));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let slope = json_file(&out.join("sweep.json"))["diam_fit"]["slope"].as_f64().unwrap();
    assert!((slope - 5.0 / 6.0).abs() < 0.15 * 5.0 / 6.0, "{slope}");
}

#[test]
fn thread_variable_is_validated() {
    let o = run(bin().env("MINKPERI_THREADS", "zero").args(["measure", preset("shapes/unit_square.json").to_str().unwrap()]));
    assert_eq!(code(&o), 2);
    let o = run(bin().env("MINKPERI_THREADS", "1").args(["measure", preset("shapes/unit_square.json").to_str().unwrap()]));
    assert_eq!(code(&o), 0);
}
