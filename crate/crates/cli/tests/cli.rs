use std::path::PathBuf;
use std::process::{Command, Output};

fn utm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_utm")).args(args).output().expect("utm runs")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("utm-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn csv_rows(bytes: &[u8]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_reader(bytes);
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn solve_at_t0_reproduces_fi_poly1() {
    let out = utm(&["solve", "--problem", "fi", "--datum", "fi_poly1", "--t", "0", "--x-grid", "19"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&out.stdout);
    assert_eq!(header, ["x", "t", "q_re", "q_im", "err_est"]);
    assert_eq!(rows.len(), 19);
    for r in rows {
        let x: f64 = r[0].parse().unwrap();
        let q: f64 = r[2].parse().unwrap();
        assert!((q - (x - 2.0 * x * x + x * x * x)).abs() <= 1e-5, "x = {x}");
        // 17 significant digits
        assert_eq!(r[2].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    }
}

#[test]
fn verify_all_for_hl_exp1_passes() {
    let dir = scratch("verify");
    let manifest = dir.join("manifest.json");
    let out = utm(&["verify", "--suite", "all", "--problem", "hl", "--datum", "hl_exp1", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let records: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(records.len() >= 8);
    for r in &records {
        for key in ["check_id", "problem", "datum", "params", "magnitude", "tolerance", "pass"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
        assert_eq!(r["pass"], true, "{r}");
    }
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(m["config"]["radius"], 60.0);
    assert_eq!(m["config"]["datum"], "hl_exp1");
    assert_eq!(m["checks"].as_array().unwrap().len(), records.len());
    assert!(m["tool_version"].is_string() && m["wall_time_s"].is_number());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn below_axis_control_fails_as_designed() {
    let out = utm(&["verify", "--suite", "augeig", "--problem", "hl", "--datum", "hl_exp1", "--below-axis"]);
    assert_eq!(out.status.code(), Some(1));
    let records: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    let control = records.iter().find(|r| r["check_id"] == "type2_vanishing_minus").unwrap();
    assert_eq!(control["pass"], false);
    assert!(control["magnitude"].as_f64().unwrap() > 1e-3);
}

#[test]
fn configuration_errors_exit_2() {
    let cases: [&[&str]; 7] = [
        &["solve", "--problem", "fi", "--datum", "no_such_datum"],
        &["solve", "--problem", "hl", "--datum", "fi_poly1"],
        &["solve", "--problem", "fi", "--datum", "fi_sine"],
        &["solve", "--problem", "kdv", "--datum", "fi_poly1"],
        &["verify", "--problem", "fi", "--datum", "fi_poly1", "--delta", "1"],
        &["verify", "--problem", "heat", "--datum", "heat_exp", "--suite", "zeros"],
        &["solve", "--config", "/nonexistent/utm.toml"],
    ];
    for args in cases {
        let out = utm(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn flags_override_config_file() {
    let dir = scratch("config");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "problem = \"fi\"\ndatum = \"fi_poly2\"\nx_grid = 4\nt = [0.0]\n").unwrap();
    let out = utm(&["solve", "--config", cfg.to_str().unwrap(), "--x-grid", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(csv_rows(&out.stdout).1.len(), 3);
    std::fs::write(&cfg, "problem = \"fi\"\nunknown_knob = 1\n").unwrap();
    assert_eq!(utm(&["solve", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn transform_exports() {
    let dir = scratch("transform");
    let (contour, samples) = (dir.join("contour.csv"), dir.join("samples.json"));
    let out = utm(&[
        "transform",
        "--problem",
        "fi",
        "--datum",
        "fi_poly1",
        "--lambda",
        "2:0.1,-1:-0.3",
        "--contour-out",
        contour.to_str().unwrap(),
        "--samples-json",
        samples.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&out.stdout);
    assert_eq!(header, ["contour", "lambda_re", "lambda_im", "F_re", "F_im"]);
    assert_eq!(rows.len(), 4);
    let (header, rows) = csv_rows(&std::fs::read(&contour).unwrap());
    assert_eq!(header, ["seg_index", "t_param", "re", "im"]);
    assert!(!rows.is_empty());
    let s: Vec<serde_json::Value> = serde_json::from_slice(&std::fs::read(&samples).unwrap()).unwrap();
    assert_eq!(s.len(), 4);
    for v in &s {
        assert!(v["abs_err_est"].as_f64().unwrap() < 1e-8, "{v}");
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn transform_on_half_line_contours() {
    let out = utm(&["transform", "--problem", "hl", "--datum", "hl_exp1", "--radius", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&out.stdout).1;
    assert!(rows.iter().any(|r| r[0] == "plus") && rows.iter().any(|r| r[0] == "minus"));
    // each point is kept on the branches where the transform exists
    let out = utm(&["transform", "--problem", "hl", "--datum", "hl_exp1", "--lambda", "0:3,2:-0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out.stdout).1;
    assert_eq!(rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["plus", "minus"]);
    // and rejected when it exists on neither
    let out = utm(&["transform", "--problem", "hl", "--datum", "hl_exp1", "--lambda", "3:3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zeros_csv_schema() {
    let out = utm(&["zeros", "--radius", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&out.stdout);
    assert_eq!(header, ["re", "im", "multiplicity", "residual", "region_tag"]);
    // origin (double) and three zeros per ray within |lambda| <= 12
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0][2], "2");
    assert_eq!(rows[0][4], "origin");
}

#[test]
fn tabulated_datum_file() {
    let dir = scratch("table");
    let path = dir.join("poly.csv");
    let mut text = String::from("x,f,f1,f2,f3\n");
    for k in 0..=20 {
        let x = k as f64 / 20.0;
        // x - 2x^2 + x^3
        text += &format!("{x},{},{},{},{}\n", x - 2.0 * x * x + x * x * x, 1.0 - 4.0 * x + 3.0 * x * x, -4.0 + 6.0 * x, 6.0);
    }
    std::fs::write(&path, text).unwrap();
    let out = utm(&["solve", "--problem", "fi", "--datum-file", path.to_str().unwrap(), "--t", "0", "--x-grid", "5", "--x-min", "0.2", "--x-max", "0.8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for r in csv_rows(&out.stdout).1 {
        let x: f64 = r[0].parse().unwrap();
        let q: f64 = r[2].parse().unwrap();
        assert!((q - (x - 2.0 * x * x + x * x * x)).abs() < 1e-5, "x = {x}: {q}");
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["verify", "--suite", "identity", "--problem", "fi", "--datum", "fi_poly2", "--seed", "11"];
    let a = utm(&args);
    let b = utm(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = utm(&["verify", "--suite", "identity", "--problem", "fi", "--datum", "fi_poly2", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}
