use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_isocorr");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth_returns(dir: &Path, n: usize, t: usize, rho: f64) -> PathBuf {
    let out = dir.join(format!("synth_{n}_{t}"));
    ok(&[
        "synth",
        "--out",
        s(&out),
        "--n",
        &n.to_string(),
        "--t",
        &t.to_string(),
        "--rho",
        &rho.to_string(),
        "--sigma",
        "0.01",
    ]);
    out.join("returns.csv")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn ingest_round_trips_canonical_fixture() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok(&[
        "ingest",
        "--input",
        s(&fixture("prices_3x5.csv")),
        "--out",
        s(&out),
    ]);
    assert_eq!(
        fs::read(out.join("prices_clean.csv")).unwrap(),
        fs::read(fixture("prices_3x5.csv")).unwrap()
    );
    assert_eq!(csv_rows(&out.join("returns.csv")).len(), 12);
    let report = json(&out.join("ingest_report.json"));
    assert_eq!(report["assets_loaded"], 3);
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "ingest");
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["config"].get("out").is_none());
}

#[test]
fn ingest_window_and_coverage() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok(&[
        "ingest",
        "--input",
        s(&fixture("prices_3x5.csv")),
        "--out",
        s(&out),
        "--from",
        "2024-10-02",
        "--to",
        "2024-10-04",
    ]);
    assert_eq!(csv_rows(&out.join("returns.csv")).len(), 6);
    ok(&[
        "ingest",
        "--input",
        s(&fixture("prices_gappy.csv")),
        "--out",
        s(&out),
        "--min-coverage",
        "0.8",
    ]);
    assert_eq!(json(&out.join("ingest_report.json"))["assets_dropped"], 1);
}

#[test]
fn ingest_rejects_negative_price() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "ingest",
        "--input",
        s(&fixture("prices_negative.csv")),
        "--out",
        s(&tmp.path().join("x")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 9"));
}

#[test]
fn missing_input_names_path() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("no_such_panel.csv");
    for cmd in ["pairs", "ndof", "ingest", "allocate"] {
        let mut args = vec![cmd, "--input", s(&missing), "--out", "unused"];
        if cmd == "allocate" {
            args.extend(["--rho", "0.1", "--lambda", "1"]);
        }
        let out = run(&args);
        assert_eq!(out.status.code(), Some(4), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_panel.csv"));
    }
}

#[test]
fn two_asset_panel_pairs() {
    let tmp = TempDir::new().unwrap();
    let input = synth_returns(tmp.path(), 2, 60, 0.2);
    let out = tmp.path().join("pairs");
    ok(&[
        "pairs",
        "--input",
        s(&input),
        "--out",
        s(&out),
        "--trials",
        "20",
    ]);
    let rows = csv_rows(&out.join("pairs.csv"));
    assert_eq!(rows.len(), 20);
    assert!(rows
        .iter()
        .all(|r| r[0] == "A000" && r[1] == "A001" && r[2] == rows[0][2]));
    let summary = json(&out.join("pairs_summary.json"));
    assert!(summary["sd_z"].as_f64().unwrap() < 1e-12);
}

#[test]
fn pairs_accepts_price_input() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("pairs");
    ok(&[
        "pairs",
        "--input",
        s(&fixture("prices_3x5.csv")),
        "--out",
        s(&out),
        "--trials",
        "5",
        "--bins",
        "4",
    ]);
    assert_eq!(csv_rows(&out.join("fisher_histogram.csv")).len(), 4);
    let summary = json(&out.join("pairs_summary.json"));
    assert!(summary["ks"].is_null());
}

#[test]
fn single_trial_ndof_skips_fit() {
    let tmp = TempDir::new().unwrap();
    let input = synth_returns(tmp.path(), 20, 80, 0.1);
    let out = tmp.path().join("ndof");
    ok(&[
        "ndof",
        "--input",
        s(&input),
        "--out",
        s(&out),
        "--trials",
        "1",
    ]);
    assert_eq!(csv_rows(&out.join("ndof_trials.csv")).len(), 1);
    let fit = json(&out.join("ndof_fit.json"));
    assert!(fit["fit"].is_null() && fit["verdict"].is_null());
    let curves = csv_rows(&out.join("ndof_curves.csv"));
    assert_eq!(curves.len(), 20);
    assert!(curves.iter().all(|r| r[1].is_empty() && r[3].is_empty()));
}

#[test]
fn ndof_recovers_rho_on_isotropic_input() {
    let tmp = TempDir::new().unwrap();
    let input = synth_returns(tmp.path(), 200, 1500, 0.15);
    let out = tmp.path().join("ndof");
    ok(&[
        "ndof",
        "--input",
        s(&input),
        "--out",
        s(&out),
        "--trials",
        "400",
    ]);
    let fit = json(&out.join("ndof_fit.json"));
    for key in ["rho_hat_terminal", "rho_hat_intercept"] {
        let r = fit["verdict"][key].as_f64().unwrap();
        assert!((r / 0.15 - 1.0).abs() < 0.30, "{key} = {r}");
    }
    let window = &fit["fit"]["fit_range"];
    assert_eq!(
        (window[0].as_u64(), window[1].as_u64()),
        (Some(120), Some(200))
    );
    ok(&[
        "ndof",
        "--input",
        s(&input),
        "--out",
        s(&out),
        "--trials",
        "400",
        "--fit-min",
        "50",
        "--fit-max",
        "150",
    ]);
    let window = &json(&out.join("ndof_fit.json"))["fit"]["fit_range"];
    assert_eq!(
        (window[0].as_u64(), window[1].as_u64()),
        (Some(50), Some(150))
    );
}

fn alpha_file(dir: &Path, rows: &[(&str, f64, f64)]) -> PathBuf {
    let path = dir.join("alpha.csv");
    let mut body = String::from("asset_id,alpha,sigma\n");
    for (id, a, s) in rows {
        body.push_str(&format!("{id},{a},{s}\n"));
    }
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn allocate_identity_case() {
    let tmp = TempDir::new().unwrap();
    let input = alpha_file(
        tmp.path(),
        &[("X", 0.03, 1.0), ("Y", -0.01, 1.0), ("Z", 0.02, 1.0)],
    );
    let out = tmp.path().join("alloc");
    ok(&[
        "allocate",
        "--input",
        s(&input),
        "--out",
        s(&out),
        "--rho",
        "0",
        "--lambda",
        "0.5",
    ]);
    let rows = csv_rows(&out.join("weights.csv"));
    let w: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    for (w, a) in w.iter().zip([0.03, -0.01, 0.02]) {
        assert!((w - a).abs() < 1e-15);
    }
    let diag = json(&out.join("allocation.json"));
    assert_eq!(diag["omega"], 1.0);
    assert_eq!(diag["centering"], 0.0);
}

#[test]
fn allocate_laplace_and_singular() {
    let tmp = TempDir::new().unwrap();
    let input = alpha_file(tmp.path(), &[("X", 0.03, 0.2), ("Y", -0.01, 0.3)]);
    let out = tmp.path().join("alloc");
    ok(&[
        "allocate",
        "--input",
        s(&input),
        "--out",
        s(&out),
        "--rho",
        "0.3",
        "--lambda",
        "1",
        "--model",
        "laplace",
    ]);
    let omega = json(&out.join("allocation.json"))["omega"]
        .as_f64()
        .unwrap();
    assert!(omega > 0.0 && omega < 2.0);
    let bad = run(&[
        "allocate",
        "--input",
        s(&input),
        "--out",
        s(&out),
        "--rho",
        "1",
        "--lambda",
        "1",
    ]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("singular"));
    let bad = run(&[
        "allocate",
        "--input",
        s(&input),
        "--out",
        s(&out),
        "--rho",
        "0.1",
        "--lambda",
        "-1",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn curves_grid_and_asymptote() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("curves");
    ok(&[
        "curves",
        "--out",
        s(&out),
        "--rho",
        "0.25,0.5,1",
        "--n-max",
        "10000",
    ]);
    let risk = csv_rows(&out.join("risk_curves.csv"));
    assert_eq!(risk.len(), 3 * 10_000);
    assert_eq!(csv_rows(&out.join("centering_curves.csv")).len(), 30_000);
    let last_quarter = risk
        .iter()
        .find(|r| r[0] == "0.25" && r[1] == "10000")
        .unwrap();
    let ratio: f64 = last_quarter[4].parse().unwrap();
    assert!((ratio / 3.0 - 1.0).abs() < 0.01);
    assert!(risk.iter().filter(|r| r[0] == "1").all(|r| r[3] == "0"));
    let bad = run(&["curves", "--out", s(&out), "--rho", "-0.5", "--n-max", "10"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn dense_dump_shapes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("dense");
    ok(&["dense", "--out", s(&out), "--n", "4", "--rho", "0.3"]);
    for name in ["g.csv", "q.csv", "g_inv.csv"] {
        let rows = csv_rows(&out.join(name));
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.len() == 4));
    }
}

#[test]
fn synth_prices_ingest_cleanly() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("synth");
    ok(&[
        "synth",
        "--out",
        s(&out),
        "--n",
        "5",
        "--t",
        "30",
        "--format",
        "prices",
        "--factors",
        "2",
    ]);
    let run_dir = tmp.path().join("ingest");
    ok(&[
        "ingest",
        "--input",
        s(&out.join("prices.csv")),
        "--out",
        s(&run_dir),
    ]);
    assert_eq!(csv_rows(&run_dir.join("returns.csv")).len(), 5 * 30);
}
