// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::Command;

use ftprep::analytic::ideal_decay;
use ftprep::cli::{main_with_args, DecayRow, SweepRow};
use ftprep::fit::{model_coefficients, InsertionFit};
use ftprep::noise::NoiseConfig;
use ftprep::prep::Site;
use tempfile::TempDir;

fn write_config(dir: &Path, noise: &NoiseConfig, target: &str, theta: &str, t_us: &str) -> PathBuf {
    let text = format!(
        "seed = 7\nshots = 20000\ntarget = \"{target}\"\npost_rotation = \"frame\"\n\n\
         [sweep]\ntheta = {theta}\n\n[decay]\nt_us = {t_us}\n\n[tomo]\nshots_per_setting = 1000\n\n\
         [output]\ndir = \"{}\"\n\n[noise]\n{}",
        dir.join("out").display(),
        toml::to_string(noise).unwrap()
    );
    let path = dir.join("cfg.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn ftprep(cfg: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["ftprep", "--config", cfg.to_str().unwrap()];
    argv.extend_from_slice(args);
    main_with_args(argv)
}

fn rows<T: serde::de::DeserializeOwned>(path: &Path) -> Vec<T> {
    csv::Reader::from_path(path).unwrap().deserialize().map(|r| r.unwrap()).collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const THETA13: &str = "{ start = 0.0, stop = 3.141592653589793, count = 13 }";

#[test]
fn ideal_prep_is_perfect() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &NoiseConfig::ideal(), "11", THETA13, "[0.0]");
    assert_eq!(ftprep(&cfg, &["prep"]), 0);
    let m = json(&dir.path().join("out/prep_11_metrics.json"));
    assert_eq!(m["summary"]["acceptance"]["value"], 1.0);
    assert!((m["codespace"]["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-12, "{m}");
}

#[test]
fn uniform_readout_band() {
    let dir = TempDir::new().unwrap();
    let noise = NoiseConfig::device().with_uniform_readout(0.108, 0.043);
    let cfg = write_config(dir.path(), &noise, "11", THETA13, "[0.0]");
    assert_eq!(ftprep(&cfg, &["--exact", "prep"]), 0);
    let a = json(&dir.path().join("out/prep_11_metrics.json"))["summary"]["acceptance"]["value"].as_f64().unwrap();
    assert!(a > 0.6 && a < 0.95, "{a}");
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &NoiseConfig::device(), "11", THETA13, "[0.0]");
    let read = |name: &str| std::fs::read(dir.path().join("out").join(name)).unwrap();
    assert_eq!(ftprep(&cfg, &["prep"]), 0);
    assert_eq!(ftprep(&cfg, &["sweep", "A"]), 0);
    let (shots, sweep) = (read("prep_11_shots.csv"), read("sweep_a.csv"));
    assert_eq!(ftprep(&cfg, &["prep"]), 0);
    assert_eq!(ftprep(&cfg, &["sweep", "A"]), 0);
    assert_eq!(shots, read("prep_11_shots.csv"));
    assert_eq!(sweep, read("sweep_a.csv"));
    assert_eq!(ftprep(&cfg, &["--seed", "8", "prep"]), 0);
    assert_ne!(shots, read("prep_11_shots.csv"));
}

#[test]
fn ideal_sweeps() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &NoiseConfig::ideal(), "00", THETA13, "[0.0]");
    assert_eq!(ftprep(&cfg, &["--exact", "sweep", "b"]), 0);
    let b: Vec<SweepRow> = rows(&dir.path().join("out/sweep_b.csv"));
    assert_eq!(b.len(), 13);
    assert!(b.iter().all(|r| (r.accept - 1.0).abs() < 1e-12));

    assert_eq!(ftprep(&cfg, &["--exact", "sweep", "c"]), 0);
    let c: Vec<SweepRow> = rows(&dir.path().join("out/sweep_c.csv"));
    assert!(c.last().unwrap().accept.abs() < 1e-12);
    assert!(c.last().unwrap().err_protected.is_none());

    let cfg = write_config(dir.path(), &NoiseConfig::ideal(), "00", "{ start = 0.0, stop = 0.9, count = 10 }", "[0.0]");
    assert_eq!(ftprep(&cfg, &["--exact", "sweep", "yy"]), 0);
    let yy: Vec<SweepRow> = rows(&dir.path().join("out/sweep_yy.csv"));
    assert!(yy.windows(2).all(|w| w[1].accept < w[0].accept), "{:?}", yy.iter().map(|r| r.accept).collect::<Vec<_>>());
}

#[test]
fn decay_matches_ideal_law() {
    let dir = TempDir::new().unwrap();
    let mut noise = NoiseConfig::ideal();
    noise.t1_us = [60.0; 5];
    let cfg = write_config(dir.path(), &noise, "11", THETA13, "{ start = 0.0, stop = 120.0, count = 7 }");
    assert_eq!(ftprep(&cfg, &["--exact", "decay", "11"]), 0);
    let r: Vec<DecayRow> = rows(&dir.path().join("out/decay_11.csv"));
    assert_eq!(r[0].p1_protected, Some(1.0));
    assert_eq!(r[0].p1_gauge, Some(1.0));
    for row in &r {
        let want = ideal_decay(row.t_us, 60.0).unwrap();
        assert!((row.p1_protected.unwrap() - want).abs() < 1e-6, "{row:?}");
        assert!((row.model_p1_protected.unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn sweep_fit_round_trip() {
    let dir = TempDir::new().unwrap();
    let noise = NoiseConfig::ideal().with_uniform_readout(0.05, 0.02);
    let cfg = write_config(dir.path(), &noise, "00", "{ start = 0.0, stop = 3.141592653589793, count = 25 }", "[0.0]");
    let out = dir.path().join("out");
    let mut specs = Vec::new();
    for s in ["a", "b", "c"] {
        assert_eq!(ftprep(&cfg, &["--exact", "sweep", s]), 0);
        specs.push(format!("{}={}", s.to_uppercase(), out.join(format!("sweep_{s}.csv")).display()));
    }
    let mut args = vec!["--exact", "fit", "insertion"];
    args.extend(specs.iter().map(String::as_str));
    assert_eq!(ftprep(&cfg, &args), 0);
    let fit: InsertionFit = serde_json::from_value(json(&out.join("fit_insertion.json"))).unwrap();
    for (f, site) in fit.sites.iter().zip(Site::ALL) {
        let want = model_coefficients(site, 0.05, 0.02).unwrap();
        for (got, want) in f.coefficients.as_array().iter().zip(want.as_array()) {
            assert!((got - want).abs() < 1e-4, "{site}: {got} vs {want}");
        }
        assert!(f.delta.abs() < 1e-4);
    }
    assert_eq!(ftprep(&cfg, &["fit", "match", out.join("fit_insertion.json").to_str().unwrap()]), 0);
    let m = json(&out.join("fit_match.json"));
    assert!((m["p0"].as_f64().unwrap() - 0.05).abs() < 1e-4);
    assert!((m["p1"].as_f64().unwrap() - 0.02).abs() < 1e-4);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_ftprep");
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "shots = 0\n").unwrap();
    let st = Command::new(bin).args(["--config", bad.to_str().unwrap(), "prep"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(!st.stderr.is_empty());

    let cfg = write_config(dir.path(), &NoiseConfig::ideal(), "11", THETA13, "[0.0]");
    let csv = dir.path().join("broken.csv");
    std::fs::write(&csv, "t_us,accept,p1_protected,p1_gauge,accept_stderr,p1_protected_stderr,p1_gauge_stderr\n0,1,1,1,0,0,0\n5,x,1,1,0,0,0\n").unwrap();
    let st = Command::new(bin)
        .args(["--config", cfg.to_str().unwrap(), "fit", "decay", csv.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains(":3:"), "{}", String::from_utf8_lossy(&st.stderr));

    let st = Command::new(bin).args(["sweep", "Q"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}
