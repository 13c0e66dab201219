// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use floquet_cages_cli::config::ExperimentConfig;
use floquet_cages_cli::run::{sha256_hex, RunManifest};

const MINIMAL: &str = r#"{
    "model": {"kind": "qhd", "Lx": 2, "Ly": 2, "N": 1},
    "drive": {"layers": [{"generator": "V", "duration": 1.0}, {"generator": "H", "duration": 1.0}]},
    "observables": {"compute": ["spectrum"]}
}"#;

fn fcages(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcages"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> RunManifest {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn minimal_spectrum_run_writes_one_csv_and_a_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "min.json", MINIMAL);
    let out = fcages(tmp.path(), &["spectrum", "--config", &cfg, "--out", "run"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let run = tmp.path().join("run");
    let mut names: Vec<String> = std::fs::read_dir(&run)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["manifest.json", "spectrum.csv"]);

    let m = manifest(&run);
    assert_eq!(m.files.len(), 1);
    let csv = std::fs::read_to_string(run.join("spectrum.csv")).unwrap();
    assert_eq!(m.files[0].sha256, sha256_hex(csv.as_bytes()));
    assert!(csv.starts_with("index,eigenvalue\n"));
    // 2x2 ring of four single-particle states: eigenvalues -2, 0, 0, 2.
    let values: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (v, e) in values.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
        assert!((v - e).abs() < 1e-12, "{values:?}");
    }
    assert_eq!(m.summary["static_zero_modes"], 2.0);
}

#[test]
fn repeated_runs_reproduce_checksums() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "ibrg.json",
        r#"{"model": {"kind": "ibrg", "N1": 20, "N2": 26, "alpha": 2.0, "M": 2},
            "drive": {"layers": [{"generator": "G*", "duration": 0.7}]},
            "observables": {"compute": ["quasienergies", "echo", "memory", "band_overlap", "cages"], "n_max": 200},
            "seed": 11}"#,
    );
    for dir in ["a", "b"] {
        let out = fcages(tmp.path(), &["observe", "--config", &cfg, "--out", dir]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (a, b) = (manifest(&tmp.path().join("a")), manifest(&tmp.path().join("b")));
    assert_eq!(a.files.len(), b.files.len());
    for (fa, fb) in a.files.iter().zip(&b.files) {
        assert_eq!(fa.path, fb.path);
        assert_eq!(fa.sha256, fb.sha256, "{}", fa.path);
        let bytes = std::fs::read(tmp.path().join("a").join(&fa.path)).unwrap();
        assert_eq!(fa.sha256, sha256_hex(&bytes));
    }
    assert_eq!(a.config_sha256, b.config_sha256);
    // Zero-mode lower bound from the imbalance.
    assert!(a.summary["zero_modes"] >= 6.0);

    let other = fcages(tmp.path(), &["observe", "--config", &cfg, "--out", "c", "--seed", "12"]);
    assert_eq!(other.status.code(), Some(0));
    assert_ne!(manifest(&tmp.path().join("c")).config_sha256, a.config_sha256);
}

#[test]
fn validation_errors_exit_with_2_and_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), "bad.json", &MINIMAL.replace("\"H\"", "\"Z\""));
    let out = fcages(tmp.path(), &["evolve", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("drive.layers[1].generator"));

    let missing = fcages(tmp.path(), &["spectrum"]);
    assert_eq!(missing.status.code(), Some(2));

    let no_drive = write_config(tmp.path(), "static.json", r#"{"model": {"kind": "toy", "L": 4}}"#);
    assert_eq!(fcages(tmp.path(), &["evolve", "--config", &no_drive]).status.code(), Some(2));
    assert_eq!(fcages(tmp.path(), &["sweep", "--config", &no_drive]).status.code(), Some(2));
    assert_eq!(fcages(tmp.path(), &["recipe", "fig99"]).status.code(), Some(2));
}

#[test]
fn capacity_errors_exit_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    let big = write_config(tmp.path(), "big.json", &MINIMAL.replace("\"Lx\": 2", "\"Lx\": 9").replace("\"Ly\": 2", "\"Ly\": 9"));
    let out = fcages(tmp.path(), &["enumerate", "--config", &big]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("capacity"));
}

#[test]
fn enumerate_writes_graph_json_and_edge_list() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "g.json", &MINIMAL.replace("\"N\": 1", "\"N\": 2").replace("\"Lx\": 2", "\"Lx\": 3").replace("\"Ly\": 2", "\"Ly\": 3"));
    let out = fcages(tmp.path(), &["enumerate", "--config", &cfg, "--out", "g"]);
    assert_eq!(out.status.code(), Some(0));
    let graph: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("g/graph.json")).unwrap()).unwrap();
    assert_eq!(graph["lattice"]["Lx"], 3);
    assert_eq!(graph["N"], 2);
    assert_eq!(graph["nodes"].as_array().unwrap().len(), 24);
    assert_eq!(graph["parity"].as_array().unwrap().len(), 24);
    let edges = std::fs::read_to_string(tmp.path().join("g/edges.txt")).unwrap();
    assert_eq!(edges.lines().count(), graph["edges"].as_array().unwrap().len());
}

#[test]
fn recipe_list_and_config_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let list = fcages(tmp.path(), &["recipe", "list"]);
    let text = String::from_utf8(list.stdout).unwrap();
    for name in ["fig1c", "fig2a", "fig2b", "fig3a", "fig3b", "fig4b", "figEA", "figS-AFAI", "figS-toy"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
    let printed = fcages(tmp.path(), &["recipe", "fig2b", "--print-config"]);
    let json = String::from_utf8(printed.stdout).unwrap();
    let cfg = ExperimentConfig::parse(&json).unwrap();
    assert_eq!(cfg.to_json().trim(), json.trim());
}

#[test]
fn toy_recipe_shows_two_pi_modes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = fcages(tmp.path(), &["recipe", "figS-toy", "--out", "toy"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("toy/quasienergies.csv")).unwrap();
    assert!(csv.starts_with("index,quasienergy_times_tau\n"));
    let near_pi = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .filter(|t| (t.abs() - PI).abs() < 1e-6)
        .count();
    assert_eq!(near_pi, 2);
    let m = manifest(&tmp.path().join("toy"));
    assert_eq!(m.summary["period_doubled_cls"], 2.0);
    assert!(tmp.path().join("toy/motifs.json").exists());
    assert!(tmp.path().join("toy/schedule.json").exists());
}

#[test]
fn sweep_aggregates_one_row_per_task() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sweep.json",
        r#"{"model": {"kind": "ibrg", "N1": 12, "N2": 15, "alpha": 2.0},
            "drive": {"layers": [{"generator": "G*", "duration": 1.0}]},
            "observables": {"compute": ["memory"]},
            "sweep": {"parameters": [{"pointer": "/model/M", "values": [1, 2, 3]},
                                     {"pointer": "/model/alpha", "values": [2.0, 4.0]}],
                      "seeds": 3, "threads": 2},
            "seed": 3}"#,
    );
    let out = fcages(tmp.path(), &["sweep", "--config", &cfg, "--out", "s"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("s/sweep.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..5], ["task", "replicate", "seed", "/model/M", "/model/alpha"]);
    let memory = header.iter().position(|h| *h == "memory").unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 18);
    for r in &rows {
        let m: f64 = r[memory].parse().unwrap();
        assert!((0.0..=1.0).contains(&m));
    }
    assert_eq!(manifest(&tmp.path().join("s")).summary["tasks"], 18.0);
    assert!(tmp.path().join("s/task_0017/quasienergies.csv").exists());
}
