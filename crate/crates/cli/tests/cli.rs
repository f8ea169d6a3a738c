use std::path::Path;
use std::process::{Command, Output};

fn weyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weyl"))
        .args(args)
        .env_remove("WEYL_OUT_DIR")
        .output()
        .expect("run weyl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv::Reader::from_path(path).unwrap();
    let header = rd.headers().unwrap().iter().map(String::from).collect();
    let rows = rd
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

const COMPLEX_CONFIG: &str = r#"{
  "a": [[0.8, 0.1], [0.5, -0.3], [0.9, 0.2], [0.6, 0.4], [0.7, -0.1], [0.75, 0.05]],
  "b": [[0.1, 0.2], [-0.3, 0.1], [0.2, -0.2], [0.0, 0.3], [0.1, 0.0], [-0.2, -0.1]],
  "a0": [1.0, 0.0],
  "tail": "free"
}"#;

#[test]
fn weyl_all_on_free_is_minus_z() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("weyl.csv");
    let o = weyl(&[
        "weyl", "--free", "--method", "all", "--rect=-1,1,4.5,6.5,3,3", "--lambda", "0,6", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = read_csv(&out);
    assert_eq!(rows.len(), 10);
    let f = |row: &[String], name: &str| row[col(&h, name)].parse::<f64>().unwrap();
    for row in &rows {
        assert_eq!(row[col(&h, "in_region_d")], "true");
        let (zr, zi) = (f(row, "z_re"), f(row, "z_im"));
        for m in [
            "resolvent_finite",
            "series_interval",
            "series_measure",
            "resolvent_semiinfinite",
            "series_halfline",
        ] {
            assert_eq!(row[col(&h, &format!("{m}_status"))], "ok", "{m}");
            let (re, im) = (f(row, &format!("{m}_re")), f(row, &format!("{m}_im")));
            assert!((re + zr).abs() < 1e-10 && (im + zi).abs() < 1e-10, "{m}: {re} {im} vs {zr} {zi}");
        }
    }
}

#[test]
fn weyl_single_method_columns() {
    let o = weyl(&["weyl", "--free", "--method", "resolvent", "--lambda", "0.5,3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.contains("resolvent_finite_re"));
    assert!(!header.contains("series_"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn weyl_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, COMPLEX_CONFIG).unwrap();
    let o = weyl(&[
        "weyl", "--config", cfg.to_str().unwrap(), "--lambda", "0,5", "--lambda", "3,0", "--n", "6",
        "--format", "json", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["meta"]["series_convention"].is_string());
    assert_eq!(v["meta"]["n"], 6);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let lam = rows[0]["lambda"].as_array().unwrap();
    assert_eq!((lam[0].as_f64(), lam[1].as_f64()), (Some(0.0), Some(5.0)));
    // inside D all routes give a value; the finite ones agree with each other
    let fin = &rows[0]["resolvent_finite"];
    let ser = &rows[0]["series_interval"];
    let d = (fin[0].as_f64().unwrap() - ser[0].as_f64().unwrap()).hypot(fin[1].as_f64().unwrap() - ser[1].as_f64().unwrap());
    assert!(d < 1e-9, "{d}");
    assert!(rows[0]["dev_series_interval"].as_f64().unwrap() < 1e-9);
    // lambda = 3 lies outside D: series routes fail, resolvent does not
    assert_eq!(rows[1]["in_region_d"], false);
    assert!(rows[1]["series_interval"].is_null());
    assert!(rows[1]["series_interval_status"].as_str().unwrap().starts_with("failed"));
    assert!(rows[1]["resolvent_finite"].is_array());
}

#[test]
fn response_finite_speed_message() {
    let o = weyl(&["response", "--free", "--check-finite-speed", "--n", "5", "--horizon", "12"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("agree through t=8"), "{text}");
}

#[test]
fn response_finite_speed_complex() {
    let o = weyl(&["response", "--inline", COMPLEX_CONFIG, "--check-finite-speed", "--n", "3", "--horizon", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("agree through t=4"));
    assert!(text.contains("first difference at t=6"), "{text}");
    // header plus 10 samples after the two report lines
    assert_eq!(text.lines().filter(|l| l.contains(',')).count(), 11);
}

#[test]
fn simulate_zero_horizon_is_error() {
    let o = weyl(&["simulate", "--free", "--horizon", "0"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty"));
}

#[test]
fn simulate_delta_and_file_control() {
    let dir = tempfile::tempdir().unwrap();
    let ctl = dir.path().join("f.csv");
    std::fs::write(&ctl, "re,im\n1,0\n0,0\n0,0\n0,0\n").unwrap();
    let a = weyl(&["simulate", "--free", "--horizon", "4"]);
    let b = weyl(&["simulate", "--free", "--horizon", "4", "--control", ctl.to_str().unwrap()]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next().unwrap(), "t,n,u_re,u_im");
    // (T + 1) time layers times (T + 2) sites
    assert_eq!(text.lines().count(), 1 + 5 * 6);
    // free half-line: u_{n,n} = 1
    assert!(text.contains("\n3,3,1.0000000000000000e0,0.0000000000000000e0\n"));

    let short = weyl(&["simulate", "--free", "--horizon", "9", "--control", ctl.to_str().unwrap()]);
    assert!(!short.status.success());
}

#[test]
fn simulate_interval_requires_n() {
    let o = weyl(&["simulate", "--free", "--horizon", "4", "--geometry", "interval"]);
    assert!(!o.status.success());
    let o = weyl(&["simulate", "--free", "--horizon", "4", "--geometry", "interval", "--n", "2"]);
    assert!(o.status.success());
}

#[test]
fn takagi_exports_measure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = weyl(&["takagi", "--inline", COMPLEX_CONFIG, "--n", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("residual_unitary"));
    let (h, rows) = read_csv(&out);
    assert_eq!(rows.len(), 5);
    let total: f64 = rows.iter().map(|r| r[col(&h, "weight")].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn takagi_degenerate_block_fails() {
    // odd free block has eigenvalue 0
    let o = weyl(&["takagi", "--free", "--n", "3"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("repeated or zero"));
}

#[test]
fn region_map_and_curve() {
    let o = weyl(&["region", "--bound", "1", "--lambda", "0,0.5", "--lambda", "0,5", "--lambda", "4.3,0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let flags: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(flags, ["false", "true", "true"]);

    let o = weyl(&["region", "--bound", "1", "--part", "curve", "--points", "8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 9);
    // phi = 0 sits on the real axis at R + 1/R = 4.25
    assert!(text.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,4.2500000000000000e0,"));
}

#[test]
fn out_dir_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_weyl"))
        .args(["region", "--bound", "2", "--part", "curve", "--format", "json"])
        .env("WEYL_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("region-curve.json")).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 256);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = weyl(&[
            "weyl", "--inline", COMPLEX_CONFIG, "--rect=-2,2,1,3,4,3", "--n", "6", "--out", p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn verify_single_criterion_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = weyl(&["verify", "--criterion", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("[PASS]  3 finite speed"));
    let (h, rows) = read_csv(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][col(&h, "passed")], "true");

    let bad = weyl(&["verify", "--criterion", "12"]);
    assert!(!bad.status.success());
}

#[test]
fn invalid_inputs() {
    assert!(!weyl(&["weyl", "--free"]).status.success());
    assert!(!weyl(&["weyl", "--free", "--rect=0,1,0,1,0,2"]).status.success());
    assert!(!weyl(&["weyl", "--free", "--lambda", "1"]).status.success());
    assert!(!weyl(&["weyl", "--lambda", "0,3"]).status.success());
    let bad_cfg = r#"{"a": [[0, 0]], "b": [[1, 0]]}"#;
    let o = weyl(&["weyl", "--inline", bad_cfg, "--lambda", "0,3"]);
    assert!(!o.status.success());
    let unknown = r#"{"a": [[1, 0]], "b": [[1, 0]], "extra": 1}"#;
    assert!(!weyl(&["weyl", "--inline", unknown, "--lambda", "0,3"]).status.success());
}
