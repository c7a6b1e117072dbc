// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lipsqml_core::bench::{accuracy, derive_seed};
use lipsqml_core::model::CircuitDocument;
use lipsqml_core::{generate_circle_dataset, Observable, PauliWord};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lipsqml"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lipsqml-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    if !out.status.success() {
        eprintln!("stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

/// Preset shrunk so a training run takes well under a second.
fn small_config(dir: &Path) -> PathBuf {
    let out = run(bin().arg("preset"));
    assert!(out.status.success());
    let mut c: Value = serde_json::from_slice(&out.stdout).unwrap();
    c["train"]["epochs"] = 15.into();
    c["train"]["restarts"] = 2.into();
    c["data"]["n_train"] = 40.into();
    c["data"]["n_test"] = 60.into();
    c["sweep"]["lambda_grid"] = serde_json::json!([0.0, 0.25]);
    c["sweep"]["eps_grid"] = serde_json::json!([0.0, 0.1]);
    c["sweep"]["noise_samples"] = 5.into();
    c["sweep"]["n_test_generalization"] = 80.into();
    c["output_dir"] = dir.join("default-out").to_str().unwrap().into();
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&c).unwrap()).unwrap();
    path
}

fn payload(path: &Path) -> Value {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["payload"].clone()
}

#[test]
fn generate_data_is_deterministic() {
    let dir = scratch("gen");
    for name in ["a.csv", "b.csv"] {
        let out = run(bin().args(["generate-data", "--n", "200", "--seed", "7", "--out"]).arg(dir.join(name)));
        assert!(out.status.success());
    }
    let a = std::fs::read_to_string(dir.join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read_to_string(dir.join("b.csv")).unwrap());
    assert_eq!(a.lines().count(), 201);
    assert_eq!(a.lines().next(), Some("x1,x2,label"));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = scratch("usage");
    let out = run(bin().args(["generate-data", "--n", "0", "--out"]).arg(dir.join("x.csv")));
    assert_eq!(out.status.code(), Some(2));

    let config = small_config(&dir);
    let out = run(bin().args(["train", "--lambda=-0.5", "--config"]).arg(&config));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("train.lambda"));

    let mut c: Value = serde_json::from_str(&std::fs::read_to_string(&config).unwrap()).unwrap();
    c["sweep"]["typo"] = 1.into();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, c.to_string()).unwrap();
    let out = run(bin().args(["train", "--config"]).arg(&bad));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep.typo"));

    let out = run(bin().args(["train", "--paper", "--config"]).arg(&config));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_1() {
    let dir = scratch("runtime");
    let config = small_config(&dir);
    let out = run(bin()
        .args(["sweep", "--mode", "robustness", "--config"])
        .arg(&config)
        .arg("--model")
        .arg(dir.join("missing-a.json"))
        .arg("--model")
        .arg(dir.join("missing-b.json")));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing-a.json") && err.contains("missing-b.json"));

    let corrupt = dir.join("corrupt.json");
    std::fs::write(&corrupt, "{\"payload\": 3").unwrap();
    let out = run(bin().args(["bound", "--model"]).arg(&corrupt));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn train_bound_and_sweep_round_trip() {
    let dir = scratch("train");
    let config = small_config(&dir);
    for run_dir in ["r1", "r2"] {
        let out = run(bin().args(["train", "--config"]).arg(&config).arg("--out").arg(dir.join(run_dir)));
        assert!(out.status.success());
    }
    let model = dir.join("r1/model.json");
    let p = payload(&model);
    assert_eq!(p, payload(&dir.join("r2/model.json")));
    assert_eq!(
        std::fs::read(dir.join("r1/history.csv")).unwrap(),
        std::fs::read(dir.join("r2/history.csv")).unwrap()
    );

    // Reloading the stored circuit reproduces the recorded train accuracy.
    let doc: CircuitDocument = serde_json::from_value(p["circuit"].clone()).unwrap();
    let (circuit, params) = doc.to_model().unwrap();
    let obs = Observable::new(
        p["observable"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| PauliWord::from_label(t["pauli"].as_str().unwrap(), t["coefficient"].as_f64().unwrap()).unwrap())
            .collect(),
    );
    let seed = p["config"]["data"]["seed"].as_u64().unwrap();
    let train_set = generate_circle_dataset(40, derive_seed(seed, 0)).unwrap();
    assert_eq!(accuracy(&circuit, &params, &obs, &train_set).unwrap(), p["train_accuracy"].as_f64().unwrap());

    let out = run(bin().args(["bound", "--model"]).arg(&model));
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["scaled"]["lipschitz_tight"], p["lipschitz_tight"]);
    assert_eq!(report["raw"]["domain_convention"], "raw_data_space");
    let terms: f64 = report["scaled"]["per_gate_terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .sum();
    let tight = p["lipschitz_tight"].as_f64().unwrap();
    assert!((terms - tight / 2.0).abs() < 1e-12);
    let bound_at = |n: &str| {
        let out = run(bin().args(["bound", "--n", n, "--model"]).arg(&model));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v["generalization"]["bound"].as_f64().unwrap()
    };
    assert!(bound_at("100000") < bound_at("1000"));

    let sweep_dir = dir.join("sweep");
    let out = run(bin()
        .args(["sweep", "--mode", "robustness", "--config"])
        .arg(&config)
        .arg("--model")
        .arg(&model)
        .arg("--out")
        .arg(&sweep_dir));
    assert!(out.status.success());
    let csv = std::fs::read_to_string(sweep_dir.join("sweep_robustness.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("model_id,lambda,eps_bar,train_acc,test_acc,worst_case_acc,lipschitz_tight,lipschitz_simple,seed")
    );
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[2].parse::<f64>().unwrap(), 0.0);
    assert_eq!(first[5].parse::<f64>().unwrap(), p["test_accuracy"].as_f64().unwrap());
    assert!(sweep_dir.join("sweep_robustness.json").is_file());
    assert!(sweep_dir.join("sweep_robustness.dat").is_file());
}

#[test]
fn lambda_sweep_has_one_row_per_grid_value() {
    let dir = scratch("lambda");
    let config = small_config(&dir);
    let out = run(bin().args(["sweep", "--mode", "lambda", "--config"]).arg(&config));
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.join("default-out/sweep_lambda.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn schema_and_preset_print_json() {
    for cmd in ["schema", "preset"] {
        let out = run(bin().arg(cmd));
        assert!(out.status.success());
        let _: Value = serde_json::from_slice(&out.stdout).unwrap();
    }
}
