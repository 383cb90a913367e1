//! Runs the `mockrep` binary on the fixtures and checks exit codes and reports.

use mockrep::cli::{exit_code, RunConfig};
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn mockrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mockrep")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn validate_passes_for_a_builtin() {
    let out = mockrep(&["validate", "--system", "shearlet", "--gamma", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    for key in ["command", "version", "config", "report", "passed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["command"], "validate");
    assert_eq!(v["passed"], true);
    assert_eq!(v["config"]["gamma"], 0.5);
}

#[test]
fn corrupted_phi_fails_the_phi_check() {
    let out = mockrep(&["validate", "--config", &fixture("corrupted_phi.json")]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let checks = v["report"]["checks"].as_array().unwrap();
    let phi = checks.iter().find(|c| c["tag"] == "PHI").unwrap();
    assert_eq!(phi["passed"], false);
    assert_eq!(v["passed"], false);
}

#[test]
fn configuration_errors_exit_two() {
    let out = mockrep(&["validate", "--config", &fixture("missing_system.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));

    assert_eq!(mockrep(&["validate", "--system", "nope"]).status.code(), Some(2));
    assert_eq!(mockrep(&["validate", "--config", "/nonexistent/run.json"]).status.code(), Some(2));

    let p = scratch("unknown_key.json");
    std::fs::write(&p, r#"{"system":"wavelet1d","sampel_budget":100}"#).unwrap();
    assert_eq!(mockrep(&["validate", "--config", p.to_str().unwrap()]).status.code(), Some(2));

    let p = scratch("tiny_fiber.json");
    std::fs::write(&p, r#"{"system":"dilrot2d","grids":{"fiber_resolution":4}}"#).unwrap();
    assert_eq!(mockrep(&["coarea", "--config", p.to_str().unwrap()]).status.code(), Some(2));

    let p = scratch("bad_gamma.json");
    std::fs::write(&p, r#"{"system":"shearlet","gamma":-1}"#).unwrap();
    assert_eq!(mockrep(&["validate", "--config", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let out = mockrep(&["classify", "--config", &fixture("corrupted_phi.json"), "--system", "wavelet1d"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config"]["system"], "wavelet1d");
    assert_eq!(v["config"]["sample_budget"], 100);
    assert_eq!(v["report"]["conclusion"], "REPRODUCING");
}

#[test]
fn classify_heisenberg_cites_the_dimension_bound() {
    let out = mockrep(&["classify", "--system", "heisenberg"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["conclusion"], "NOT_REPRODUCING");
    assert_eq!(v["report"]["n_vs_d"], "n>d");
    assert!(v["report"]["cited"][0].as_str().unwrap().starts_with("DIMENSION_BOUND"));
}

#[test]
fn coarea_passes_for_fibered_systems_only() {
    let out = mockrep(&["coarea", "--system", "dilrot2d"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);
    let out = mockrep(&["coarea", "--system", "heisenberg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["report"]["error"].is_string());
}

#[test]
fn reproduce_fixtures() {
    let out = mockrep(&["reproduce", "--config", &fixture("wavelet1d_reproduce.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out)["report"]["energy_ratio"].as_f64().unwrap();
    assert!((0.98..=1.02).contains(&r), "{r}");

    let out = mockrep(&["reproduce", "--config", &fixture("wavelet1d_zero_eta.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["energy_ratio"], 0.0);

    let out = mockrep(&["reproduce", "--config", &fixture("heisenberg_reproduce.json")]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["report"]["verdict"], "NOT_REPRODUCING");
    assert!(v["report"]["slope"].as_f64().unwrap() > 0.0);
    assert!(v["report"]["r_squared"].as_f64().unwrap() > 0.999);
}

#[test]
fn transform_writes_csv_and_summary() {
    let p = scratch("wavelet1d.csv");
    let out = mockrep(&["transform", "--system", "wavelet1d", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let n = v["report"]["coefficients"].as_u64().unwrap() as usize;
    let mut rdr = csv::Reader::from_path(&p).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["a_1", "h_1", "re", "im", "weight"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), n);
    let energy: f64 = rows.iter().map(|r| (r[2].parse::<f64>().unwrap().powi(2) + r[3].parse::<f64>().unwrap().powi(2)) * r[4].parse::<f64>().unwrap()).sum();
    let want = v["report"]["energy"].as_f64().unwrap();
    assert!((energy - want).abs() <= 1e-9 * want, "{energy} vs {want}");
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_mockrep"))
            .args(["validate", "--system", "dilrot2d"])
            .env("MOCKREP_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn admissible_dilrot2d() {
    let out = mockrep(&["admissible", "--system", "dilrot2d"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["closed_form"]["satisfied"], true);
    assert!(v["report"]["fiber_criterion"]["max_residual"].as_f64().unwrap() <= 1e-2);
    let out = mockrep(&["admissible", "--system", "dilrot2d", "--eta", "zero"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_config_parsing() {
    let c = RunConfig::from_json(r#"{"system":"shearlet","gamma":2.0,"energy_band":[0.9,1.1]}"#).unwrap();
    assert_eq!(c.gamma, Some(2.0));
    assert_eq!(c.energy_band, Some([0.9, 1.1]));
    let e = RunConfig::from_json(r#"{"system":"shearlet","grids":{"bogus":1}}"#).unwrap_err();
    assert_eq!(exit_code(&e), 2);
    let e = RunConfig::from_json("{not json").unwrap_err();
    assert_eq!(exit_code(&e), 2);
    let e = RunConfig::default().example().unwrap_err();
    assert_eq!(exit_code(&e), 2);
    assert_eq!(exit_code(&mockrep::Error::Domain("x".into())), 1);
    let c = RunConfig::from_json(r#"{"system":"heisenberg","heisenberg_t":[1.0]}"#).unwrap();
    assert!(c.validate().is_err());
}
