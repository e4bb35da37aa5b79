//! Subcommands end to end through the built binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use corrsv::data::{self, InputMode};
use corrsv::simulate;
use corrsv::{ModelKind, ModelParams, SimConfig};

fn corrsv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrsv")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = corrsv(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulated_path_reingests_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sim");
    ok(&["simulate", "--out", s(&out), "--seed", "5", "--horizon", "300", "--rho", "-0.3"]);
    let got = data::ingest(&out.join("path.csv"), InputMode::Returns).unwrap();

    let p = ModelParams::new(ModelKind::MeanCorrected, -7.88, 0.96, 0.18, -0.3).unwrap();
    let want = simulate::simulate_path(&p, &SimConfig::new(300, 5)).unwrap();
    assert_eq!(got.returns, want.returns);
    assert_eq!(got.labels.first().map(String::as_str), Some("1"));

    let m = json(&out.join("manifest.json"));
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["outputs"][0], "path.csv");
}

#[test]
fn fit_gof_report_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    ok(&["simulate", "--out", s(&sim), "--seed", "11", "--horizon", "200"]);
    let input = sim.join("path.csv");

    let mut fits = Vec::new();
    for model in ["svm0", "svmrhomu"] {
        let dir = tmp.path().join(model);
        ok(&[
            "fit", "--out", s(&dir), "--input", s(&input), "--model", model,
            "--iters", "1800", "--burn", "300", "--thin", "5", "--seed", "3",
        ]);
        let summary = json(&dir.join("summary.json"));
        assert_eq!(summary["retained"], 300);
        assert_eq!(summary["observations"], 200);
        let chain = fs::read_to_string(dir.join("chain.csv")).unwrap();
        assert_eq!(chain.lines().count(), 301);
        let latent = fs::read_to_string(dir.join("latent_mean.csv")).unwrap();
        assert_eq!(latent.lines().count(), 202);
        fits.push(dir);
    }

    let gof = tmp.path().join("gof");
    ok(&["gof", "--out", s(&gof), "--input", s(&input), "--fit", s(&fits[1]), "--lags", "0,-1,2"]);
    let g = json(&gof.join("gof.json"));
    assert!(g["mspe"].as_f64().unwrap() > 0.0);
    assert_eq!(g["empirical_leadlag"].as_object().unwrap().len(), 3);

    let rep = tmp.path().join("report");
    let out = ok(&["report", "--out", s(&rep), "--input", s(&input), "--fit", s(&fits[0]), "--fit", s(&fits[1])]);
    let text = fs::read_to_string(rep.join("report.txt")).unwrap();
    assert!(text.contains("svm0") && text.contains("svmrhomu"));
    assert!(text.lines().any(|l| l.starts_with("Deviance")));
    assert!(String::from_utf8_lossy(&out.stdout).contains("report.txt"));
}

#[test]
fn moments_output_fields() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["moments", "--out", s(tmp.path()), "--k-max", "4"]);
    let m = json(&tmp.path().join("moments.json"));
    let text = m.to_string();
    for key in ["variance", "kurtosis", "lead_corr", "lag_corr"] {
        assert!(text.contains(key), "missing {key}");
    }
}

#[test]
fn verify_exit_code_follows_outcome() {
    let tmp = tempfile::tempdir().unwrap();
    let pass = tmp.path().join("pass");
    let small = ["--limit", "2", "--n", "200000", "--n-mu4", "200000"];
    let out = corrsv(&[&["verify", "--out", s(&pass)][..], &small].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&pass.join("verify.json"))["all_pass"], true);

    let fail = tmp.path().join("fail");
    let out = corrsv(&[&["verify", "--out", s(&fail), "--n-se", "1e-9"][..], &small].concat());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&fail.join("verify.json"))["all_pass"], false);
}

#[test]
fn bad_invocations_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = corrsv(&["simulate", "--out", s(tmp.path()), "--bogus"]);
    assert_eq!(out.status.code(), Some(2));

    let out = corrsv(&["simulate", "--out", s(tmp.path()), "--phi", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let sim = tmp.path().join("sim");
    ok(&["simulate", "--out", s(&sim), "--horizon", "50"]);
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[chain]\ntotal_iters = 100\nburn = 10\n").unwrap();
    let out = corrsv(&["fit", "--out", s(&tmp.path().join("fit")), "--input", s(&sim.join("path.csv")), "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));

    let missing = tmp.path().join("nope.csv");
    let out = corrsv(&["fit", "--out", s(&tmp.path().join("fit2")), "--input", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));

    let d = s(&sim);
    let out = corrsv(&["report", "--out", s(&tmp.path().join("r")), "--input", s(&sim.join("path.csv")), "--fit", d, "--fit", d, "--fit", d, "--fit", d]);
    assert_eq!(out.status.code(), Some(2));
}
