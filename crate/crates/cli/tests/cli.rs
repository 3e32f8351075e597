use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn polyjac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyjac")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn verify_random_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = polyjac(&["verify", "--orders", "2,3,1.5", "--n", "8", "--trials", "100", "--seed", "5", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("seed: 5\n"));
    let v = read_json(&out);
    assert_eq!(v["passed"], true);
    for c in v["classes"].as_array().unwrap() {
        assert!(c["max_residual"].as_f64().unwrap() <= 1e-12);
        assert_eq!(c["samples"], 100);
    }
}

#[test]
fn verify_threshold_breach_exits_one() {
    let o = polyjac(&["verify", "--orders", "3", "--n", "4", "--trials", "10", "--seed", "1", "--threshold", "1e-30"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("BREACH"));
}

#[test]
fn verify_linear_system_file() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("lin.json");
    fs::write(&sys, r#"{"n": 2, "D": [[2, 0], [0, 3]], "terms": [], "b": [1, 1]}"#).unwrap();
    let o = polyjac(&["verify", "--system", p(&sys), "--seed", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("no nonlinear terms"));
}

#[test]
fn verify_problem_and_system_files() {
    let o = polyjac(&["verify", "--problem", "fractional", "--n", "8,16", "--trials", "20", "--seed", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("stiffness identity"));
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("cubic.json");
    fs::write(
        &sys,
        r#"{"n": 1, "D": [[1]], "b": [-14],
            "terms": [{"variant": "power", "matrices": [[[1]]], "exponent": 2},
                      {"variant": "pointwise_product", "matrices": [[[1]], [[1]]], "exponent": 0.5}]}"#,
    )
    .unwrap();
    let o = polyjac(&["verify", "--system", p(&sys), "--seed", "2", "--trials", "50"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\": 2, \"b\": [1,").unwrap();
    for cmd in ["verify", "solve", "jacobian"] {
        let o = polyjac(&[cmd, "--system", p(&bad)]);
        assert_eq!(code(&o), 2, "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));
    }
    let shape = dir.path().join("shape.json");
    fs::write(&shape, r#"{"n": 2, "D": [[1, 0]], "b": [1, 1]}"#).unwrap();
    assert_eq!(code(&polyjac(&["solve", "--system", p(&shape)])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&polyjac(&["jacobian", "--system", p(&missing)])), 2);
    assert_eq!(code(&polyjac(&["solve", "--problem", "navier-stokes"])), 2);
    assert_eq!(code(&polyjac(&["solve", "--problem", "burgers", "--param", "nu=100"])), 2);
}

#[test]
fn solve_burgers_newton() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = polyjac(&["solve", "--problem", "burgers", "--n", "32", "--method", "newton", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    assert_eq!(v["converged"], true);
    assert!(v["iterations"].as_u64().unwrap() <= 8);
    assert!(v["final_residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["solution"].as_array().unwrap().len(), 32);
}

#[test]
fn solve_nofe_compare() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = polyjac(&["solve", "--problem", "burgers", "--n", "32", "--method", "newton-nofe", "--compare", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    assert_eq!(v["loop_term_evaluations"], 0);
    let devs = v["comparison"]["deviations"].as_array().unwrap();
    assert!(devs.len() >= 2);
    assert!(devs.iter().all(|d| d.as_f64().unwrap() <= 1e-10));
    assert!(stdout(&o).contains("deviation"));
}

#[test]
fn solve_exit_codes() {
    assert_eq!(code(&polyjac(&["solve", "--problem", "mixed", "--method", "newton-nofe"])), 3);
    let o = polyjac(&["solve", "--problem", "duffing", "--max-iters", "1", "--tol", "1e-15"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("not converged"));
    assert_eq!(code(&polyjac(&["solve", "--problem", "burgers", "--compare"])), 2);
    assert_eq!(code(&polyjac(&["solve", "--problem", "burgers", "--inner", "sor", "--omega", "2.5", "--method", "linear-like"])), 2);
    assert_eq!(code(&polyjac(&["solve", "--problem", "burgers", "--n", "8,16"])), 2);
}

#[test]
fn solve_csv_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = polyjac(&["solve", "--problem", "duffing", "--n", "16", "--method", "linear-like", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("iter,residual_norm,step_norm,millis"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    for (i, row) in rows.iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f.len(), 4);
        assert_eq!(f[0].parse::<usize>().unwrap(), i + 1);
        for x in &f[1..] {
            x.parse::<f64>().unwrap();
        }
    }
    let last: f64 = rows.last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(last <= 1e-10);
}

#[test]
fn solve_reports_are_stable_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = polyjac(&["solve", "--problem", "fractional", "--no-timing", "--format", "json", "--out", p(out)]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"problem": {"name": "burgers", "n": 12, "params": {"nu": 0.5}},
            "solver": {"method": "linear-like", "inner": "sor", "omega": 1.4, "max_iters": 80}}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let o = polyjac(&["solve", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v = read_json(&out);
    assert_eq!(v["method"], "linear-like");
    assert!(v["inner_sweeps"].as_u64().unwrap() > 0);
    assert_eq!(v["solution"].as_array().unwrap().len(), 12);
    let o = polyjac(&["solve", "--config", p(&cfg), "--method", "newton", "--n", "10", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    assert_eq!(v["method"], "newton");
    assert_eq!(v["solution"].as_array().unwrap().len(), 10);
    fs::write(&cfg, r#"{"solver": {"bogus": 1}}"#).unwrap();
    assert_eq!(code(&polyjac(&["solve", "--config", p(&cfg)])), 2);
}

#[test]
fn export_and_reload_system() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("duffing.json");
    let a = polyjac(&["jacobian", "--problem", "duffing", "--n", "6", "--export-system", p(&sys)]);
    assert_eq!(code(&a), 0);
    let v = read_json(&sys);
    assert_eq!(v["n"], 6);
    assert_eq!(v["terms"][0]["variant"], "power");
    let o = polyjac(&["solve", "--system", p(&sys), "--method", "newton-nofe"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn jacobian_duffing_central() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("j.json");
    let o = polyjac(&["jacobian", "--problem", "duffing", "--n", "16", "--fd", "central", "--h", "1e-5", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    let step = &v["steps"][0];
    assert!(step["max_deviation"].as_f64().unwrap() <= 1e-6);
    assert!(step["estimate"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn jacobian_report_and_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("j.json");
    let o = polyjac(&["jacobian", "--problem", "burgers", "--n", "8", "--report", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    let r = &v["report"];
    assert_eq!(r["eigenvalues"].as_array().unwrap().len(), 8);
    assert!(r["trace_deviation"].as_f64().unwrap() <= 1e-8);
    let csv = dir.path().join("j.csv");
    let o = polyjac(&["jacobian", "--problem", "mixed", "--fd", "forward", "--h", "1e-3,1e-4,1e-5", "--out", p(&csv)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("h,max_deviation,estimate\n"));
}

#[test]
fn jacobian_rejects_bad_steps() {
    for h in ["0", "-1e-5", "1.5"] {
        let o = polyjac(&["jacobian", "--problem", "burgers", "--h", h]);
        assert_eq!(code(&o), 2, "h = {h}");
    }
}

#[test]
fn seeded_verify_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let oa = polyjac(&["verify", "--seed", "42", "--out", p(&a)]);
    let ob = polyjac(&["verify", "--seed", "42", "--out", p(&b)]);
    assert_eq!(code(&oa), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(oa.stdout, ob.stdout);
    let c = dir.path().join("c.json");
    polyjac(&["verify", "--seed", "43", "--out", p(&c)]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}
