use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const GAUSSIAN: &str = r#"{"kind":"gaussian","P":1.0,"W":[1.0,0.5],"N":[0.8,0.4]}"#;
const GAUSSIAN_K2: &str = r#"{"kind":"gaussian","P":1.0,"W":[1.0,0.5],"N":[0.8,0.4],"kappa":2}"#;
const BINARY: &str = r#"{"kind":"binary","p":[0.1,0.05],"beta":[0.2,0.25]}"#;

fn wzbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wzbc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn problem_file(dir: &TempDir, json: &str) -> String {
    let path = dir.path().join("problem.json");
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn rows(path: &Path) -> Vec<[f64; 2]> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            [a.parse().unwrap(), b.parse().unwrap()]
        })
        .collect()
}

fn compare(dir: &TempDir, problem: &str, schemes: &str, out: &str, extra: &[&str]) -> Output {
    let out = dir.path().join(out);
    let mut args = vec![
        "compare",
        "--problem",
        problem,
        "--schemes",
        schemes,
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    wzbc(&args)
}

#[test]
fn gaussian_compare_writes_csvs_and_script() {
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, GAUSSIAN);
    let o = compare(&dir, &problem, "converse,uncoded,cds,lds,separate,scheme3", "out", &["--resolution", "61"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("out");
    for s in ["converse", "uncoded", "cds", "lds", "separate", "scheme3"] {
        let path = out.join(format!("{s}.csv"));
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(&format!("# scheme={s}, params=")), "{text}");
        for [d1, d2] in rows(&path) {
            // converse corner and every achievable point lie in the zero-rate box
            assert!(d1 > 0.0 && d1 <= 0.8 + 1e-9 && d2 > 0.0 && d2 <= 0.4 + 1e-9, "{s}: {d1},{d2}");
            assert!(d1 >= 0.4 - 1e-9 && d2 >= 0.4 / 3.0 - 1e-9, "{s} beats the converse: {d1},{d2}");
        }
    }
    assert_eq!(rows(&out.join("converse.csv")).len(), 3);
    let script = fs::read_to_string(out.join("plot.gp")).unwrap();
    for s in ["converse", "uncoded", "cds", "lds", "separate", "scheme3"] {
        assert!(script.contains(&format!("'{s}.csv'")));
    }
    assert!(out.join("manifest.json").exists());
}

#[test]
fn converse_is_emitted_even_when_not_requested() {
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, GAUSSIAN);
    let o = compare(&dir, &problem, "cds", "out", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("out/converse.csv").exists());
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, GAUSSIAN);
    let schemes = "lds,separate,lds-closed-form";
    assert!(compare(&dir, &problem, schemes, "a", &["--resolution", "81"]).status.success());
    let single = Command::new(env!("CARGO_BIN_EXE_wzbc"))
        .env("WZBC_THREADS", "1")
        .args(["compare", "--problem", &problem, "--schemes", schemes, "--resolution", "81", "--out"])
        .arg(dir.path().join("b"))
        .output()
        .unwrap();
    assert!(single.status.success(), "{}", stderr(&single));
    for s in ["converse", "lds", "separate", "lds-closed-form"] {
        let a = fs::read(dir.path().join(format!("a/{s}.csv"))).unwrap();
        let b = fs::read(dir.path().join(format!("b/{s}.csv"))).unwrap();
        assert_eq!(a, b, "{s}");
    }
}

#[test]
fn gaussian_only_scheme_on_binary_fails_but_others_run() {
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, BINARY);
    let o = compare(&dir, &problem, "uncoded,scheme3-closed-form,cds", "out", &["--resolution", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gaussian-only scheme"), "{}", stderr(&o));
    let out = dir.path().join("out");
    assert!(out.join("uncoded.csv").exists() && out.join("cds.csv").exists());
    assert!(!out.join("scheme3-closed-form.csv").exists());
}

#[test]
fn kappa_gate_is_per_scheme() {
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, GAUSSIAN_K2);
    let o = compare(&dir, &problem, "uncoded,lds", "out", &["--resolution", "21"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("uncoded"), "{}", stderr(&o));
    assert!(dir.path().join("out/lds.csv").exists());
    let o = compare(&dir, &problem, "uncoded", "fixed", &["--kappa-override", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn empty_and_unknown_scheme_lists_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, GAUSSIAN);
    let o = compare(&dir, &problem, "", "out", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty scheme list"));
    let o = compare(&dir, &problem, "cds,bogus", "out2", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown scheme `bogus`"));
    assert!(dir.path().join("out2/cds.csv").exists());
}

#[test]
fn malformed_problem_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, r#"{"kind":"gaussian","P":-1,"W":[1,1],"N":[0.5,0.5]}"#);
    let o = compare(&dir, &problem, "cds", "out", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("power must be positive"), "{}", stderr(&o));
}

fn point(problem: &str, scheme: &str, sets: &[&str]) -> Output {
    let mut args = vec!["point", "--problem", problem, "--scheme", scheme];
    for s in sets {
        args.push("--set");
        args.push(s);
    }
    wzbc(&args)
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn point_lds_full_common_power_is_cds() {
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, GAUSSIAN);
    let v = json(&point(&problem, "lds", &["nu=1"]));
    assert_eq!(v["scheme"], "lds");
    assert!((v["D1"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((v["D2"].as_f64().unwrap() - 0.4 / 1.5).abs() < 1e-12);
    assert_eq!(v["flags"].as_array().unwrap().len(), 0);
}

#[test]
fn point_lds_gamma_zero_matches_closed_form() {
    // W_c = 1 > W_r = 0.5 with c = receiver 1
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, GAUSSIAN);
    let v = json(&point(&problem, "lds", &["nu=0.5", "gamma=0", "c=1"]));
    let d_c = v["D1"].as_f64().unwrap();
    let cf = json(&point(&problem, "lds-closed-form", &[&format!("D_c={d_c}"), "c=1"]));
    assert!((cf["D2"].as_f64().unwrap() - v["D2"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn point_reports_clamping_and_rejects_bad_parameters() {
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, GAUSSIAN);
    // γ far from optimal drives the common-layer rate negative
    let v = json(&point(&problem, "lds", &["nu=0.1", "gamma=5"]));
    assert_eq!(v["flags"][0], "rate-clamped");
    let o = point(&problem, "lds", &["nu=2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nu"), "{}", stderr(&o));
    let o = point(&problem, "lds", &["nu=0.5", "zeta=1"]);
    assert!(stderr(&o).contains("unknown parameter `zeta`"), "{}", stderr(&o));
    let k2 = problem_file(&dir, GAUSSIAN_K2);
    assert_eq!(point(&k2, "uncoded", &[]).status.code(), Some(2));
}

#[test]
fn point_binary_lds_and_separate() {
    let dir = TempDir::new().unwrap();
    let problem = problem_file(&dir, BINARY);
    // zero-rate corner: nothing sent, each receiver keeps its side information
    let v = json(&point(
        &problem,
        "lds",
        &["q_c=0", "q_r=0", "alpha_c=0", "alpha_r=0", "gamma_c=0.5", "gamma_r=0"],
    ));
    assert!((v["D1"].as_f64().unwrap() - 0.2).abs() < 1e-15);
    assert!((v["D2"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    let v = json(&point(&problem, "separate", &["theta=0.5", "q_b=0", "alpha_b=0", "q_g=0", "alpha_g=0"]));
    assert!((v["D1"].as_f64().unwrap() - 0.2).abs() < 1e-15);
    let o = point(&problem, "lds", &["q_c=1", "q_r=1", "alpha_c=0", "alpha_r=0", "gamma_c=0.5", "gamma_r=0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("do not fit"), "{}", stderr(&o));
}

#[test]
fn validate_exit_codes() {
    let o = wzbc(&["validate", "dmc-consistency"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().filter(|l| l.trim_start().starts_with("PASS")).count() >= 2, "{text}");
    let o = wzbc(&["validate", "dmc-consistency", "--tolerance", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    assert_eq!(wzbc(&["validate", "no-such-suite"]).status.code(), Some(2));
}

#[test]
fn validate_mc_uncoded_seed_42() {
    let o = wzbc(&["validate", "mc-uncoded", "--seed", "42"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}
