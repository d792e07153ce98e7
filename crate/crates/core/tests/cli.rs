use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chebband"))
}

fn system_file(dir: &TempDir, name: &str, endpoints: &[f64]) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, serde_json::json!({ "endpoints": endpoints }).to_string()).unwrap();
    p
}

fn run(args: &[&str], system: &Path) -> Output {
    bin().args(args).arg("--system").arg(system).output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn analyze_reports_capacity_of_segment() {
    let dir = TempDir::new().unwrap();
    let sys = system_file(&dir, "s.json", &[-1.0, 1.0]);
    let v = stdout_json(&run(&["analyze"], &sys));
    assert!((v["table"]["capacity"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn analyze_symmetric_two_band_measures() {
    let dir = TempDir::new().unwrap();
    let sys = system_file(&dir, "s.json", &[-1.0, -0.4, 0.4, 1.0]);
    let v = stdout_json(&run(&["analyze"], &sys));
    for w in v["table"]["omega_inf"].as_array().unwrap() {
        assert!((w.as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn malformed_json_exits_two_with_error_record() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, "{\"endpoints\": [-1.0, ").unwrap();
    let o = run(&["analyze"], &p);
    assert_eq!(o.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "usage");
    assert!(e["error"]["message"].is_string());
}

#[test]
fn invalid_system_and_missing_degree_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let bad = system_file(&dir, "b.json", &[-1.0, 0.5, 0.2, 1.0]);
    assert_eq!(run(&["analyze"], &bad).status.code(), Some(2));
    let good = system_file(&dir, "g.json", &[-1.0, 1.0]);
    assert_eq!(run(&["remez"], &good).status.code(), Some(2));
    assert_eq!(run(&["remez", "--n", "0"], &good).status.code(), Some(2));
}

#[test]
fn remez_cubic_on_segment() {
    let dir = TempDir::new().unwrap();
    let sys = system_file(&dir, "s.json", &[-1.0, 1.0]);
    let v = stdout_json(&run(&["remez", "--n", "3"], &sys));
    assert!((v["deviation"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(v["alternation"].as_array().unwrap().len(), 4);
}

#[test]
fn predict_grid_csv_is_sorted() {
    let dir = TempDir::new().unwrap();
    let sys = system_file(&dir, "s.json", &[-1.0, -0.4, 0.2, 1.0]);
    let csv_path = dir.path().join("grid.csv");
    let o = bin()
        .args(["predict", "--n", "12", "--grid", "50", "--csv"])
        .arg(&csv_path)
        .arg("--system")
        .arg(&sys)
        .output()
        .unwrap();
    let v = stdout_json(&o);
    assert_eq!(v["predictions"][0]["n"], 12);
    let mut r = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["x", "value"]);
    let xs: Vec<f64> = r.records().map(|rec| rec.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(xs.len(), 100);
    assert!(xs.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn bridge_emits_ratio() {
    let dir = TempDir::new().unwrap();
    let sys = system_file(&dir, "s.json", &[-1.0, -0.4, 0.2, 1.0]);
    let v = stdout_json(&run(&["bridge", "--n", "4"], &sys));
    assert!(v["report"]["ratio"].as_f64().unwrap() > 0.0);
}

fn compare_csv(dir: &TempDir, endpoints: &[f64], degrees: &str) -> (Vec<csv::StringRecord>, Value) {
    let sys = system_file(dir, "c.json", endpoints);
    let summary = dir.path().join("summary.json");
    let o = bin()
        .args(["compare", "--n-list", degrees, "--summary"])
        .arg(&summary)
        .arg("--system")
        .arg(&sys)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let rows = r.records().map(|x| x.unwrap()).collect();
    (rows, serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap())
}

#[test]
fn compare_on_segment_is_exact() {
    let dir = TempDir::new().unwrap();
    let (rows, summary) = compare_csv(&dir, &[-1.0, 1.0], "2,3,4,5,6,7,8,9,10,11,12");
    let ns: Vec<usize> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ns, (2..=12).collect::<Vec<_>>());
    for r in &rows {
        let ratio: f64 = r[3].parse().unwrap();
        assert!((ratio - 1.0).abs() <= 1e-9, "{ratio}");
    }
    assert_eq!(summary["failures"], 0);
}

#[test]
fn compare_genus_one_ratio_improves() {
    let dir = TempDir::new().unwrap();
    let (rows, summary) = compare_csv(&dir, &[-1.0, -0.4, 0.2, 1.0], "10,20,40");
    let dev: Vec<f64> = rows.iter().map(|r| (r[3].parse::<f64>().unwrap() - 1.0).abs()).collect();
    assert!(dev[0] > dev[1] && dev[1] > dev[2], "{dev:?}");
    assert_eq!(summary["ratio_improves"], true);
}

#[test]
fn compare_symmetric_two_band_gap_column() {
    let dir = TempDir::new().unwrap();
    let (rows, _) = compare_csv(&dir, &[-1.0, -0.5, 0.5, 1.0], "4,5,6,7");
    for r in &rows {
        let n: usize = r[0].parse().unwrap();
        if n % 2 == 0 {
            assert!(r[4].is_empty(), "n = {n}: {:?}", &r[4]);
        } else {
            assert!(r[4].parse::<f64>().unwrap() < 1e-8, "n = {n}: {:?}", &r[4]);
        }
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let sys = system_file(&dir, "s.json", &[-1.0, -0.6, -0.3, 0.1, 0.35, 1.0]);
    for args in [&["predict", "--n-list", "7,12"][..], &["remez", "--n", "9"], &["analyze"]] {
        let a = run(args, &sys);
        let b = run(args, &sys);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}
