use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rabi_cli::output::{GROUND_STATE_HEADER, PHASE_DIAGRAM_HEADER, QUENCH_HEADER, WIGNER_HEADER};
use rabi_cli::{parse_config, Mode};
use serde_json::Value;
use tempfile::TempDir;

fn rabi(args: &[&str], config: &str, dir: &Path) -> Output {
    let path = dir.join("config.json");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_rabi"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap()
}

fn run_ok(mode: &str, config: &str, dir: &Path, extra: &[&str]) -> PathBuf {
    let out = dir.join("out");
    let mut args = vec![mode, "--output", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = rabi(&args, config, dir);
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    out
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn metadata(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("metadata.json")).unwrap()).unwrap()
}

#[test]
fn minimal_quench_config_fills_every_default() {
    let cfg = parse_config(r#"{"g0": 0.35}"#, Some(Mode::Quench)).unwrap();
    let v = cfg.to_json();
    let expected = [
        ("omega_c", 0.1),
        ("omega_q", 10.0),
        ("g_prime", 0.35 + 0.3),
        ("t_max", 100.0),
        ("dt", 0.01),
        ("gamma_c", 0.001),
        ("gamma_q", 0.001),
        ("temperature", 0.0),
        ("omega_0", 0.1),
    ];
    for (k, want) in expected {
        assert_eq!(v[k].as_f64(), Some(want), "{k}");
    }
    assert_eq!(v["n_max"], 50);
    assert_eq!(v["record_stride"], 10);
    assert_eq!(v["frame"], "interaction");
    assert_eq!(v["observables"].as_array().unwrap().len(), 6);
    assert_eq!(v["snapshot_times"], Value::Array(vec![]));
}

#[test]
fn empty_config_reports_missing_fields_and_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    for (mode, field) in [("quench", "g0"), ("ground-state", "g"), ("wigner", "g")] {
        let o = rabi(&[mode, "--output", out.to_str().unwrap()], "{}", dir.path());
        assert_eq!(o.status.code(), Some(2));
        let err = stderr(&o);
        assert!(err.contains("missing required field") && err.contains(field), "{err}");
    }
    assert!(!out.exists());
}

#[test]
fn negative_temperature_is_rejected_before_any_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = rabi(
        &["quench", "--output", out.to_str().unwrap()],
        r#"{"g0": 0.35, "temperature": -1}"#,
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid physical parameters"), "{}", stderr(&o));
    assert!(stderr(&o).contains("temperature"));
    assert!(!out.exists());
    assert_eq!(listing(dir.path()), ["config.json"]);
}

#[test]
fn unknown_key_names_the_offending_path() {
    let dir = TempDir::new().unwrap();
    let o = rabi(&["quench"], r#"{"g0": 0.35, "wigner_x": {"start": -1, "stop": 1, "n": 5}}"#, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("schema error"), "{}", stderr(&o));
    let o = rabi(&["quench"], r#"{"g0": 0.35, "temprature": 1}"#, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`temprature`"), "{}", stderr(&o));
}

#[test]
fn syntax_error_reports_line() {
    let dir = TempDir::new().unwrap();
    let o = rabi(&["quench"], "{\n  \"g0\": 0.35\n  \"dt\": 0.01\n}", dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn mismatched_mode_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    let o = rabi(&["wigner"], r#"{"mode": "quench", "g0": 0.35}"#, dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn quench_writes_series_snapshots_and_metadata() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"g0": 0.35, "n_max": 20, "snapshot_times": [10, 35, 55, 95],
                     "wigner_x": {"start": -4, "stop": 4, "points": 9},
                     "wigner_p": {"start": -4, "stop": 4, "points": 5}}"#;
    let out = run_ok("quench", config, dir.path(), &[]);
    assert_eq!(
        listing(&out),
        [
            "metadata.json",
            "quench.csv",
            "wigner_t10.00.csv",
            "wigner_t35.00.csv",
            "wigner_t55.00.csv",
            "wigner_t95.00.csv"
        ]
    );
    let (header, rows) = csv_rows(&out.join("quench.csv"));
    assert_eq!(header, QUENCH_HEADER);
    assert_eq!(rows.len(), 1001);
    assert_eq!(rows[1000][0], "100");
    for row in &rows {
        assert!(row.iter().all(|c| c.parse::<f64>().unwrap().is_finite()));
    }
    let (header, rows) = csv_rows(&out.join("wigner_t35.00.csv"));
    assert_eq!(header, WIGNER_HEADER);
    assert_eq!(rows.len(), 45);

    let meta = metadata(&out);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["mode"], "quench");
    assert!(meta["config"].get("output_dir").is_none());
    assert_eq!(meta["diagnostics"]["clip_events"], 0);
}

#[test]
fn unrequested_quench_columns_are_empty() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"g0": 0.35, "n_max": 10, "t_max": 2, "observables": ["f", "negativity"]}"#;
    let out = run_ok("quench", config, dir.path(), &[]);
    let (header, rows) = csv_rows(&out.join("quench.csv"));
    assert_eq!(header, QUENCH_HEADER);
    assert_eq!(rows.len(), 21);
    for row in rows {
        let filled: Vec<bool> = row.iter().map(|c| !c.is_empty()).collect();
        assert_eq!(filled, [true, true, false, false, true, false, false]);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let config = r#"{"g0": 0.4, "n_max": 12, "t_max": 5, "snapshot_times": [2.5],
                     "wigner_x": [-1, 0, 1], "wigner_p": [0]}"#;
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let out_a = run_ok("quench", config, a.path(), &[]);
    let out_b = run_ok("quench", config, b.path(), &[]);
    let names = listing(&out_a);
    assert_eq!(names, listing(&out_b));
    for n in names {
        assert_eq!(fs::read(out_a.join(&n)).unwrap(), fs::read(out_b.join(&n)).unwrap(), "{n}");
    }
}

#[test]
fn default_phase_diagram_grid_has_one_row_per_point() {
    let dir = TempDir::new().unwrap();
    let out = run_ok("phase-diagram", r#"{"n_max": 8}"#, dir.path(), &["--workers", "2"]);
    let (header, rows) = csv_rows(&out.join("phase_diagram.csv"));
    assert_eq!(header, PHASE_DIAGRAM_HEADER);
    assert_eq!(rows.len(), 800);
    // g outer, ω_c inner
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][1], "0.02");
    assert_eq!(rows[19][1], "0.5");
    assert_eq!(rows[20][0], rows[21][0]);
    for row in &rows {
        let wc: f64 = row[1].parse().unwrap();
        let wq: f64 = row[2].parse().unwrap();
        assert!((wc * wq - 1.0).abs() < 1e-12);
        let converged = row[9] == "true";
        assert_eq!(converged, row[10].is_empty());
    }
    // a tiny cutoff must flag the deep superradiant corner
    assert!(rows.iter().any(|r| r[9] == "false"));
    let meta = metadata(&out);
    assert_eq!(meta["diagnostics"]["points"], 800);
}

#[test]
fn phase_diagram_output_does_not_depend_on_worker_count() {
    let config = r#"{"g_values": {"start": 0, "stop": 1, "points": 7}, "omega_c_values": [0.05, 0.2], "n_max": 20}"#;
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let out_a = run_ok("phase-diagram", config, a.path(), &["--workers", "1"]);
    let out_b = run_ok("phase-diagram", config, b.path(), &["--workers", "3"]);
    for n in ["phase_diagram.csv", "metadata.json"] {
        assert_eq!(fs::read(out_a.join(n)).unwrap(), fs::read(out_b.join(n)).unwrap(), "{n}");
    }
}

#[test]
fn ground_state_and_wigner_smoke() {
    let dir = TempDir::new().unwrap();
    let out = run_ok("ground-state", r#"{"g": 0.2, "n_max": 30}"#, dir.path(), &[]);
    let (header, rows) = csv_rows(&out.join("ground_state.csv"));
    assert_eq!(header, GROUND_STATE_HEADER);
    assert_eq!(rows.len(), 1);
    let energy: f64 = rows[0][3].parse().unwrap();
    assert!(energy < -5.0 && energy > -5.1, "{energy}");
    assert_eq!(rows[0][10], "true");

    let dir = TempDir::new().unwrap();
    let config = r#"{"g": 0.0, "n_max": 10, "x": {"start": -2, "stop": 2, "points": 5}, "p": [0]}"#;
    let out = run_ok("wigner", config, dir.path(), &[]);
    let (header, rows) = csv_rows(&out.join("wigner.csv"));
    assert_eq!(header, WIGNER_HEADER);
    assert_eq!(rows.len(), 5);
    let peak: f64 = rows[2][2].parse().unwrap();
    assert!((peak - std::f64::consts::FRAC_1_PI).abs() < 1e-12);
}

#[test]
fn resolved_metadata_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let out = run_ok("quench", r#"{"g0": 0.3, "n_max": 8, "t_max": 1}"#, dir.path(), &[]);
    let meta = metadata(&out);
    let text = serde_json::to_string(&meta["config"]).unwrap();
    let resolved = parse_config(&text, None).unwrap();
    assert_eq!(resolved.to_json(), meta["config"]);

    let rerun = dir.path().join("rerun");
    fs::create_dir(&rerun).unwrap();
    let again = run_ok("quench", &text, &rerun, &[]);
    assert_eq!(
        fs::read(out.join("quench.csv")).unwrap(),
        fs::read(again.join("quench.csv")).unwrap()
    );
}

#[test]
fn output_dir_from_config_is_used() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from-config");
    let config = format!(r#"{{"g": 0.1, "n_max": 5, "output_dir": {:?}}}"#, target.to_str().unwrap());
    let o = rabi(&["ground-state"], &config, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(listing(&target), ["ground_state.csv", "metadata.json"]);
}
