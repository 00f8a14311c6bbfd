use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn broxlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_broxlab"))
        .args(args)
        .env_remove("BROXLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("broxlab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

#[test]
fn run_writes_trajectory_and_landscape() {
    let dir = scratch("run");
    let out = dir.join("sin_abs");
    let t = std::f64::consts::TAU.to_string();
    let o = broxlab(&["run", "--objective", "example1", "--t", &t, "--x0", "20", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let traj = json(&std::fs::read(out.join("traj.json")).unwrap());
    assert_eq!(traj["termination"], "reached_optimum");
    let iterates = traj["iterates"].as_array().unwrap();
    assert!(iterates.len() <= 11);
    let last = iterates.last().unwrap()[0].as_f64().unwrap();
    assert!((last - broxlab::catalog::EXAMPLE1_MINIMIZER).abs() < 1e-3);

    let csv = std::fs::read_to_string(out.join("traj.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("k,x,f,dist"));
    assert_eq!(csv.lines().count(), iterates.len() + 1);
    let landscape = std::fs::read_to_string(out.join("landscape.csv")).unwrap();
    assert_eq!(landscape.lines().count(), broxlab::cli::LANDSCAPE_POINTS + 1);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn run_on_a_finite_domain() {
    let dir = scratch("finite");
    let o = broxlab(&[
        "run",
        "--objective",
        "appD_F1_ex1",
        "--t",
        "1",
        "--x0",
        "3,0",
        "--oracle",
        "exhaustive",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let traj = json(&std::fs::read(dir.join("traj.json")).unwrap());
    assert_eq!(traj["termination"], "reached_optimum");
    let last = traj["iterates"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last, serde_json::json!([0.0, 0.0]));
}

#[test]
fn verify_exit_code_follows_the_verdict() {
    let pass = broxlab(&["verify", "--objective", "appD_F1_ex1", "--check", "assumption1", "--t", "1"]);
    assert_eq!(pass.status.code(), Some(0));
    assert_eq!(json(&pass.stdout)["verdict"], "pass");

    let dir = scratch("verify");
    let witnesses = dir.join("w.csv");
    let fail = broxlab(&[
        "verify",
        "--objective",
        "appD_F1_ex1",
        "--check",
        "assumption1",
        "--t",
        "2",
        "--csv",
        witnesses.to_str().unwrap(),
    ]);
    assert_eq!(fail.status.code(), Some(1));
    let report = json(&fail.stdout);
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["witnesses"][0]["inner"], -4.0);
    let csv = std::fs::read_to_string(witnesses).unwrap();
    assert!(csv.starts_with("kind,x,u,x_star,inner,margin,lambda,t"));
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 5] = [
        &["run", "--objective", "no_such_thing", "--t", "1", "--x0", "0"],
        &["run", "--objective", "sphere2", "--t", "1", "--x0", "0"],
        &["run", "--objective", "sphere1", "--x0", "0"],
        &["verify", "--objective", "sphere1", "--check", "bogus", "--t", "1"],
        &["suite", "--objectives", ""],
    ];
    for args in cases {
        assert_eq!(broxlab(args).status.code(), Some(2), "{args:?}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_broxlab"))
        .args(["catalog"])
        .env("BROXLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn suite_output_is_deterministic_across_thread_counts() {
    let dir = scratch("suite");
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let path = dir.join(format!("suite-{threads}.json"));
        let o = Command::new(env!("CARGO_BIN_EXE_broxlab"))
            .args(["suite", "--only", "2,6", "--seed", "3", "--out", path.to_str().unwrap()])
            .env("BROXLAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
        outputs.push(std::fs::read(path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(json(&outputs[0])["passed"], true);
}

#[test]
fn a_wrong_expectation_fails_the_suite() {
    let o = broxlab(&["suite", "--only", "2", "--expect-fail", "appD_F1_ex1@assumption1@1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = broxlab(&["suite", "--only", "2", "--expect-fail", "appD_F1_ex1@assumption1@2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn catalog_lists_every_entry() {
    let o = broxlab(&["catalog", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let entries = json(&o.stdout);
    assert_eq!(entries.as_array().unwrap().len(), broxlab::catalog::CATALOG.len());
}
