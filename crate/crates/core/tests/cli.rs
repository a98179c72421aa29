use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use crmgg::experiment::ExperimentConfig;

fn crmgg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crmgg")).args(args).output().unwrap()
}

fn small_config(out_dir: &Path) -> ExperimentConfig {
    ExperimentConfig {
        rounds: 300,
        n_stop: 600,
        replicas: 3,
        out_dir: out_dir.to_path_buf(),
        ..ExperimentConfig::desk()
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [&["frobnicate"][..], &["graph", "--bogus"], &[], &["fit", "x.csv"]] {
        let out = crmgg(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let out = crmgg(&["graph", "--weights", missing.to_str().unwrap(), "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "atom_id,weight,label\n0,1.5,0.1\n").unwrap();
    let out = crmgg(&["graph", "--weights", bad.to_str().unwrap(), "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let out = crmgg(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("sweep"));
}

#[test]
fn sweep_with_config_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let cfg_path = dir.path().join("cfg.json");
    fs::write(&cfg_path, small_config(&out_dir).to_json().unwrap()).unwrap();
    let out = crmgg(&["sweep", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["sweep.csv", "fits.csv", "config.json", "hist.csv", "fits.json"] {
        assert!(out_dir.join(name).is_file(), "{name}");
    }
    let written = fs::read_to_string(out_dir.join("config.json")).unwrap();
    assert_eq!(ExperimentConfig::from_json(&written).unwrap(), small_config(&out_dir));
    assert_eq!(written, small_config(&out_dir).to_json().unwrap());

    // fit --x V --y E on the sweep table.
    let sweep = out_dir.join("sweep.csv");
    let out = crmgg(&["fit", "--x", "V", "--y", "E", sweep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("type,slope,intercept,r2,n_points,lower_q,upper_q"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    assert!(row[1].parse::<f64>().unwrap().is_finite());
}

#[test]
fn sweep_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    fs::write(&cfg_path, small_config(Path::new("unused")).to_json().unwrap()).unwrap();
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = crmgg(&[
            "sweep",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        out_dir
    };
    let (a, b) = (run("a"), run("b"));
    for name in ["sweep.csv", "hist.csv", "fits.csv", "fits.json"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn graph_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.csv");
    let out = crmgg(&["measure", "--rounds", "200", "--seed", "3", "-o", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let args = ["graph", "--weights", w.to_str().unwrap(), "--n", "100", "--seed", "7"];
    let (a, b) = (crmgg(&args), crmgg(&args));
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn graph_stats_and_ccdf_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.csv");
    let edges = dir.path().join("edges.csv");
    assert_eq!(
        crmgg(&["measure", "--seed", "4", "-o", w.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let out = crmgg(&[
        "graph",
        "--weights",
        w.to_str().unwrap(),
        "--n",
        "500",
        "--binary",
        "-o",
        edges.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = crmgg(&["stats", edges.to_str().unwrap(), "--n", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("N,V,E"), "{text}");

    let samples = dir.path().join("deg.txt");
    fs::write(&samples, "degree\n1\n2\n2\n3\n").unwrap();
    let out = crmgg(&["ccdf", samples.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "M,survival\n0,1\n1,0.75\n2,0.25\n"
    );
}
