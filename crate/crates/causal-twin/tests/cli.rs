//! End-to-end CLI behavior: subcommand outputs, the exit-code contract, and
//! the shipped fixture files.

use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = causal_twin::cli::run(args.iter().copied(), &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn identify_prints_the_backdoor_estimand() {
    let (code, out, _) = run(&[
        "identify",
        "--graph",
        &data("case1.cg"),
        "--do",
        "T",
        "--outcome",
        "Y",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "sum_z P(y|t,z) P(z)\n");
}

#[test]
fn identify_exits_three_when_not_identified() {
    let (code, out, _) = run(&[
        "identify",
        "--graph",
        &data("fig7.cg"),
        "--do",
        "T",
        "--outcome",
        "Y",
    ]);
    assert_eq!(code, 3);
    assert!(out.starts_with("NOT IDENTIFIED"));
}

#[test]
fn infer_reports_both_routes_on_case1() {
    let (code, out, _) = run(&[
        "infer",
        "--graph",
        &data("case1.cg"),
        "--data",
        &data("table1.csv"),
        "--do",
        "T=1",
        "--outcome",
        "Y",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["method"], "backdoor");
    let y1 = &v["results"][1];
    assert!((y1["do_plugin"].as_f64().unwrap() - 0.6364706).abs() < 1e-6);
    assert!((y1["bayes_predictive"].as_f64().unwrap() - 0.630114).abs() < 1e-5);
}

#[test]
fn infer_uses_the_frontdoor_path_on_the_frontdoor_graph() {
    let dir = std::env::temp_dir().join("causal_twin_cli");
    std::fs::create_dir_all(&dir).unwrap();
    let fd_data = dir.join("fd.csv");
    let (code, _, _) = run(&[
        "simulate",
        "--graph",
        &data("frontdoor.cg"),
        "--cpts",
        &data("frontdoor_cpts.json"),
        "--m",
        "20000",
        "--seed",
        "7",
        "--out",
        fd_data.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, out, _) = run(&[
        "infer",
        "--graph",
        &data("frontdoor.cg"),
        "--data",
        fd_data.to_str().unwrap(),
        "--do",
        "T=1",
        "--outcome",
        "Y",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["method"], "frontdoor");
    assert_eq!(v["estimand"], "sum_w P(w|t) sum_t' P(y|t',w) P(t')");
    let both: Vec<f64> = (0..2)
        .map(|y| v["results"][y]["bayes_predictive"].as_f64().unwrap())
        .collect();
    assert!((both[0] + both[1] - 1.0).abs() < 1e-9);
}

#[test]
fn infer_without_abc_on_fig7_exits_three() {
    let dir = std::env::temp_dir().join("causal_twin_cli");
    std::fs::create_dir_all(&dir).unwrap();
    let ty = dir.join("ty.csv");
    std::fs::write(&ty, "T,Y,N\n0,0,200\n0,1,250\n1,0,184\n1,1,216\n").unwrap();
    let (code, _, err) = run(&[
        "infer",
        "--graph",
        &data("fig7.cg"),
        "--data",
        ty.to_str().unwrap(),
        "--do",
        "T=1",
        "--outcome",
        "Y",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("abc"));
}

#[test]
fn abc_requires_its_flags() {
    let dir = std::env::temp_dir().join("causal_twin_cli");
    std::fs::create_dir_all(&dir).unwrap();
    let ty = dir.join("ty2.csv");
    std::fs::write(&ty, "T,Y,N\n0,1,5\n1,1,5\n").unwrap();
    let (code, _, err) = run(&[
        "infer",
        "--graph",
        &data("fig7.cg"),
        "--data",
        ty.to_str().unwrap(),
        "--do",
        "T=1",
        "--outcome",
        "Y",
        "--method",
        "abc",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("--latent-card"));
}

#[test]
fn construct_emits_dot_and_json() {
    let (code, dot, _) = run(&["construct", "--graph", &data("frontdoor.cg"), "--do", "T=0"]);
    assert_eq!(code, 0);
    assert!(dot.contains("cluster_pre") && dot.contains("cluster_post"));
    assert!(dot.contains("lambda -> W;"));
    let (code, json, _) = run(&[
        "construct",
        "--graph",
        &data("frontdoor.cg"),
        "--do",
        "T=0",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["intervention"]["t_star"], 0);
}

#[test]
fn bad_data_exits_two() {
    // Table has a Z column, but the fig-7 reading declares Z latent.
    let (code, _, err) = run(&[
        "infer",
        "--graph",
        &data("fig7.cg"),
        "--data",
        &data("table1.csv"),
        "--do",
        "T=1",
        "--outcome",
        "Y",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("header mismatch"));
}

#[test]
fn converge_writes_the_promised_columns() {
    let dir = std::env::temp_dir().join("causal_twin_cli");
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("rows.csv");
    let (code, _, _) = run(&[
        "converge",
        "--graph",
        &data("case1.cg"),
        "--cpts",
        &data("case1_cpts.json"),
        "--do",
        "T",
        "--outcome",
        "Y",
        "--grid",
        "200,2000",
        "--replicates",
        "2",
        "--seed",
        "3",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with(
        "m,replicate,t_star,do_plugin,bayes_predictive,ground_truth,abs_gap_do,abs_gap_bayes,seed\n"
    ));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
}

/// The installed binary behaves like the library entry point.
#[test]
fn binary_round_trip() {
    let exe = env!("CARGO_BIN_EXE_causal-twin");
    let output = Command::new(exe)
        .args([
            "identify",
            "--graph",
            &data("frontdoor.cg"),
            "--do",
            "T",
            "--outcome",
            "Y",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&output.stdout),
        "sum_w P(w|t) sum_t' P(y|t',w) P(t')\n"
    );

    let output = Command::new(exe)
        .args([
            "identify",
            "--graph",
            &data("fig7.cg"),
            "--do",
            "T",
            "--outcome",
            "Y",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}
