use ncsphere::cli::sample_mode_spec;
use ncsphere::flow::{sysfirst_residual, validity_domain, YSymField};
use ncsphere::geometry::singularity_locus;
use ncsphere::starprod::Deformation;
use num_complex::Complex64 as C64;
use serde_json::Value;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncsphere")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ncsphere-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Data rows after the column header, split on commas.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let head = lines.next().unwrap().split(',').map(String::from).collect();
    (head, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn header_value(text: &str, key: &str) -> String {
    let prefix = format!("# {key} = ");
    text.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("no {key}")).to_string()
}

fn cplx(v: &Value) -> C64 {
    C64::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn verify_default_passes() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (head, body) = rows(&stdout(&o));
    assert_eq!(head, ["check", "max_violation", "threshold", "pass"]);
    assert!(body.len() >= 8);
    let names: Vec<&str> = body.iter().map(|r| r[0].as_str()).collect();
    for want in ["star identities", "connection consistency", "ricci assembly", "first-order deviation", "mode system vs quadrature"] {
        assert!(names.contains(&want), "{want}");
    }
    assert!(body.iter().all(|r| r[3] == "true"));
}

#[test]
fn verify_with_tiny_tolerance_fails() {
    let o = run(&["verify", "--tol", "1e-20"]);
    assert_eq!(o.status.code(), Some(1));
    let (_, body) = rows(&stdout(&o));
    assert!(body.iter().any(|r| r[3] == "false"));
    assert!(body.iter().all(|r| r[2].parse::<f64>().unwrap() == 1e-20));
}

#[test]
fn verify_json_report() {
    let o = run(&["verify", "--alpha", "-0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["config"]["alpha"].as_f64(), Some(-0.5));
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["max_violation"].as_f64().unwrap() <= c["threshold"].as_f64().unwrap()));
}

#[test]
fn curvature_undeformed_is_round() {
    let out = scratch("round.csv");
    let o = run(&["curvature", "--alpha", "0", "--grid", "200", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let (head, body) = rows(&text);
    assert_eq!(head, ["x", "R11", "R12", "R21", "R22", "R"]);
    assert_eq!(body.len(), 200);
    for r in &body {
        assert!((r[5].parse::<f64>().unwrap() - 2.0).abs() < 1e-12);
        let x: f64 = r[0].parse().unwrap();
        assert!((0.0..PI).contains(&x));
    }
    let side: Value = serde_json::from_str(&std::fs::read_to_string(scratch("round.csv.singularities.json")).unwrap()).unwrap();
    assert!(side["singularities"].as_array().unwrap().is_empty());
}

#[test]
fn curvature_flattens_near_alpha_one() {
    let o = run(&["curvature", "--alpha", "0.999", "--grid", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let locus = singularity_locus(0.999);
    let (_, body) = rows(&stdout(&o));
    let mut seen = 0;
    for r in &body {
        let x: f64 = r[0].parse().unwrap();
        assert!(locus.iter().all(|s| (x - s).abs() > 1e-6));
        if locus.iter().all(|s| (x - s).abs() >= 0.2) {
            assert!(r[5].parse::<f64>().unwrap().abs() < 0.1, "x={x}");
            seen += 1;
        }
    }
    assert!(seen > 500);
}

#[test]
fn curvature_sidecar_lists_singularities() {
    let out = scratch("sing.csv");
    let o = run(&["curvature", "--alpha", "0.75", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let side: Value = serde_json::from_str(&std::fs::read_to_string(scratch("sing.csv.singularities.json")).unwrap()).unwrap();
    let s = side["singularities"].as_array().unwrap();
    let x0 = 0.5 * (7.0f64 / 18.0).acos();
    assert!((s[0].as_f64().unwrap() - x0).abs() < 1e-12);
    assert!((s[1].as_f64().unwrap() - (PI - x0)).abs() < 1e-12);
}

#[test]
fn csv_is_reproducible_and_full_precision() {
    let a = stdout(&run(&["curvature", "--alpha", "0.3", "--grid", "50"]));
    let b = stdout(&run(&["curvature", "--alpha", "0.3", "--grid", "50"]));
    assert_eq!(a, b);
    assert_eq!(header_value(&a, "alpha"), "2.9999999999999999e-1");
    assert_eq!(header_value(&a, "grid"), "50");
    let (_, body) = rows(&a);
    for field in body.iter().flatten() {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{field}");
        assert!(!field.contains(' '));
    }
}

#[test]
fn flow_seeds_and_boundaries() {
    let o = run(&["flow"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let (lo, hi) = validity_domain(1.0, 20.0).unwrap();
    assert!(header_value(&text, "domain").contains(&format!("{lo:.16e}")));
    let (head, body) = rows(&text);
    assert_eq!(head, ["trace", "t", "x", "y", "X", "Y", "Z"]);
    for k in 0..8 {
        let first = body.iter().find(|r| r[0] == format!("seed{k}")).unwrap();
        assert_eq!(first[1].parse::<f64>().unwrap(), 0.0);
        assert!((first[2].parse::<f64>().unwrap() - (lo + 0.01)).abs() < 1e-15);
        assert!((first[3].parse::<f64>().unwrap() - 2.0 * PI * k as f64 / 8.0).abs() < 1e-15);
        let res: f64 = header_value(&text, &format!("seed{k} plane_residual")).parse().unwrap();
        assert!(res < 1e-6, "seed{k}: {res}");
    }
    for (name, edge) in [("boundary_min", lo), ("boundary_max", hi)] {
        let b: Vec<_> = body.iter().filter(|r| r[0] == name).collect();
        assert!(!b.is_empty());
        assert!(b.iter().all(|r| r[2].parse::<f64>().unwrap() == edge));
    }
    // traces stay inside the domain
    for r in body.iter().filter(|r| r[0].starts_with("seed")) {
        let x: f64 = r[2].parse().unwrap();
        assert!(x >= lo && x <= hi);
    }
}

#[test]
fn flow_without_angular_momentum_follows_meridians() {
    let o = run(&["flow", "--a0", "0", "--seed-count", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, body) = rows(&stdout(&o));
    for k in 0..5 {
        let tr: Vec<_> = body.iter().filter(|r| r[0] == format!("seed{k}")).collect();
        assert!(tr.len() > 10);
        assert!(tr.iter().all(|r| r[3] == tr[0][3]));
    }
}

#[test]
fn modes_single_mode_matches_flow_residuals() {
    let o = run(&["modes", "--modes", "0", "--p", "1", "--alpha", "0.2", "--grid", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let spec = sample_mode_spec(0);
    let f = YSymField::new(spec.v0[0].to_fn().unwrap(), spec.v0[1].to_fn().unwrap());
    let d = Deformation::from_alpha(0.2).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for r in rows {
        let x = r["x"].as_f64().unwrap();
        let (rp, rm) = sysfirst_residual(&f, x, &d).unwrap();
        let e1 = cplx(&r["residuals"][0]);
        let e2 = cplx(&r["residuals"][1]);
        let (w1, w2) = (PI / 2.0 * (rp + rm), PI / 2.0 * C64::i() * (rp - rm));
        assert!((e1 - w1).norm() < 1e-10 * w1.norm().max(1e-300));
        assert!((e2 - w2).norm() < 1e-10 * w2.norm().max(1e-300));
    }
}

#[test]
fn modes_single_mode_has_no_higher_equations() {
    let o = run(&["modes", "--modes", "0", "--p", "3", "--grid", "5"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for r in v["rows"].as_array().unwrap().iter().filter(|r| r["p"] == 3) {
        assert_eq!(r["max_abs"].as_f64(), Some(0.0));
        assert_eq!(r["constraint_violated"], Value::Bool(false));
    }
}

#[test]
fn modes_reads_and_pads_a_file() {
    let path = scratch("modes.json");
    std::fs::write(&path, serde_json::to_string(&sample_mode_spec(2)).unwrap()).unwrap();
    let a = run(&["modes", path.to_str().unwrap(), "--grid", "4"]);
    let b = run(&["modes", path.to_str().unwrap(), "--modes", "4", "--grid", "4"]);
    assert_eq!(a.status.code(), Some(0));
    let (va, vb): (Value, Value) = (serde_json::from_str(&stdout(&a)).unwrap(), serde_json::from_str(&stdout(&b)).unwrap());
    assert_eq!((va["N"].as_u64(), vb["N"].as_u64()), (Some(2), Some(4)));
    for (ra, rb) in va["rows"].as_array().unwrap().iter().zip(vb["rows"].as_array().unwrap()) {
        assert!((ra["max_abs"].as_f64().unwrap() - rb["max_abs"].as_f64().unwrap()).abs() < 1e-12);
    }
    let csv = stdout(&run(&["modes", path.to_str().unwrap(), "--grid", "4", "--format", "csv"]));
    let (head, body) = rows(&csv);
    assert_eq!(head.len(), 11);
    assert_eq!(body.len(), 16);
}

#[test]
fn modes_parse_errors_carry_position() {
    let path = scratch("bad.json");
    std::fs::write(&path, "{\n  \"N\": 1,\n  \"v0\": [\n").unwrap();
    let o = run(&["modes", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line"), "{err}");
    std::fs::write(&path, r#"{"N": 1, "v0": [{"kind": "trigpoly", "terms": []}], "vc": [[], []], "vs": [[], []]}"#).unwrap();
    assert_eq!(run(&["modes", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["verify", "--alpha", "0.2", "--h", "0.1"]).status.code(), Some(2));
    assert_eq!(run(&["curvature", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["flow", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["flow", "--seed-count", "0"]).status.code(), Some(2));
    assert_eq!(run(&["modes", "--p", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // empty validity domain
    assert_eq!(run(&["flow", "--a0", "5", "--b0", "1"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn h_flag_sets_alpha() {
    let text = stdout(&run(&["curvature", "--h", "-0.3", "--grid", "3"]));
    let a: f64 = header_value(&text, "alpha").parse().unwrap();
    assert!((a - (-0.3f64).tanh()).abs() < 1e-16);
    let b = stdout(&run(&["curvature", "--alpha", &format!("{a:e}"), "--grid", "3"]));
    assert_eq!(rows(&text).1, rows(&b).1);
}

#[test]
fn thread_cap_does_not_change_output() {
    let a = run(&["curvature", "--alpha", "0.4", "--grid", "300"]);
    let b = Command::new(env!("CARGO_BIN_EXE_ncsphere"))
        .args(["curvature", "--alpha", "0.4", "--grid", "300"])
        .env("NCSPHERE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}
