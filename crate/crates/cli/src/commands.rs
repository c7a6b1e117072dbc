// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use lipsqml_core::bench::{
    accuracy, derive_seed, generalization_sweep, generate_circle_dataset, robustness_sweep, Dataset,
    SweepModel, SweepResult,
};
use lipsqml_core::bounds::{
    covering_number_upper, generalization_bound, BoundReport, Gamma, GenBoundInputs,
};
use lipsqml_core::train::train;
use serde::Serialize;

use crate::config::{Encoding, ExperimentConfig};
use crate::error::CliError;
use crate::model_file::{ModelFile, ModelPayload, FORMAT};

/// Sub-streams of `data.seed`.
const TRAIN_STREAM: u64 = 0;
const TEST_STREAM: u64 = 1;
const GENERALIZATION_STREAM: u64 = 2;

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
pub fn print_stdout(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(anyhow::Error::from(e).context("writing to stdout").into()),
        _ => Ok(()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating directory {}", dir.display()))?;
    Ok(())
}

fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let f = File::open(path).with_context(|| format!("opening dataset {}", path.display()))?;
    Ok(Dataset::read_csv(f).with_context(|| format!("reading dataset {}", path.display()))?)
}

/// Training and test sets described by the config's data section.
pub fn datasets(config: &ExperimentConfig) -> Result<(Dataset, Dataset), CliError> {
    let d = &config.data;
    let train = match &d.train_file {
        Some(p) => read_dataset(p)?,
        None => generate_circle_dataset(d.n_train, derive_seed(d.seed, TRAIN_STREAM))?,
    };
    let test = match &d.test_file {
        Some(p) => read_dataset(p)?,
        None => generate_circle_dataset(d.n_test, derive_seed(d.seed, TEST_STREAM))?,
    };
    Ok((train, test))
}

pub fn generalization_test_set(config: &ExperimentConfig) -> Result<Dataset, CliError> {
    Ok(generate_circle_dataset(
        config.sweep.n_test_generalization,
        derive_seed(config.data.seed, GENERALIZATION_STREAM),
    )?)
}

pub fn default_model_id(encoding: Encoding, lambda: f64) -> String {
    let kind = match encoding {
        Encoding::Trainable => "trainable",
        Encoding::Fixed => "fixed",
    };
    format!("{kind}-lambda{lambda}")
}

pub fn generate_data(n: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let data = generate_circle_dataset(n, seed)?;
    data.write_csv(create(out)?)
        .with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {n} points to {}", out.display());
    Ok(())
}

pub fn train_model(config: &ExperimentConfig, out_dir: &Path, model_id: Option<String>) -> Result<(), CliError> {
    let circuit = config.build_circuit()?;
    let obs = config.build_observable()?;
    let (train_set, test_set) = datasets(config)?;
    let tc = config.train_config();
    let id = model_id.unwrap_or_else(|| default_model_id(config.circuit.encoding, tc.lambda));
    eprintln!(
        "training {id}: {} rotations, {} points, {} restarts x {} epochs",
        circuit.n_rotations(),
        train_set.len(),
        tc.restarts,
        tc.epochs
    );
    let result = train(&circuit, &obs, &train_set, &tc)?;
    let params = &result.best_params;
    let bound = BoundReport::compute(&circuit, params, &obs)?;
    let payload = ModelPayload {
        format: FORMAT.into(),
        model_id: id,
        config_hash: config.hash(),
        config: config.clone(),
        encoding: config.circuit.encoding,
        lambda: tc.lambda,
        circuit: lipsqml_core::model::CircuitDocument::from_model(&circuit, params)?,
        observable: config.observable.clone(),
        train_accuracy: accuracy(&circuit, params, &obs, &train_set)?,
        test_accuracy: accuracy(&circuit, params, &obs, &test_set)?,
        best_cost: result.best_cost,
        best_restart: result.best_restart,
        best_epoch: result.best_epoch,
        lipschitz_tight: bound.lipschitz_tight,
        lipschitz_simple: bound.lipschitz_simple,
        lipschitz_tight_raw: bound.to_raw_space().lipschitz_tight,
    };
    ensure_dir(out_dir)?;
    let model_path = out_dir.join("model.json");
    let history_path = out_dir.join("history.csv");
    eprintln!(
        "best cost {:.6} (restart {}, epoch {}), train acc {:.4}, test acc {:.4}, L {:.4}",
        payload.best_cost,
        payload.best_restart,
        payload.best_epoch,
        payload.train_accuracy,
        payload.test_accuracy,
        payload.lipschitz_tight
    );
    ModelFile::new(payload).save(&model_path)?;
    result
        .write_history_csv(create(&history_path)?)
        .with_context(|| format!("writing {}", history_path.display()))?;
    eprintln!("wrote {} and {}", model_path.display(), history_path.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct GeneralizationReport {
    n_samples: u64,
    delta: f64,
    gamma: f64,
    loss_lipschitz: f64,
    loss_sup: f64,
    radius: f64,
    data_dim: usize,
    covering_number: f64,
    bound: f64,
}

#[derive(Debug, Serialize)]
struct FullBoundReport {
    model_id: String,
    scaled: BoundReport,
    raw: BoundReport,
    generalization: GeneralizationReport,
}

pub fn bound(model: &Path, n: Option<u64>, delta: f64, gamma: Gamma) -> Result<(), CliError> {
    let file = ModelFile::load(model)?;
    let (circuit, params, obs) = file.payload.model()?;
    let scaled = BoundReport::compute(&circuit, &params, &obs)?;
    let n = n.unwrap_or(file.payload.config.data.n_train as u64);
    let inputs = GenBoundInputs {
        gamma,
        ..GenBoundInputs::with_defaults(scaled.lipschitz_tight, circuit.data_dim(), n, delta)
    };
    let bound = generalization_bound(&inputs).map_err(|e| CliError::usage(e.to_string()))?;
    let g = inputs.gamma.resolve(n, inputs.data_dim);
    let report = FullBoundReport {
        model_id: file.payload.model_id.clone(),
        raw: scaled.to_raw_space(),
        generalization: GeneralizationReport {
            n_samples: n,
            delta,
            gamma: g,
            loss_lipschitz: inputs.loss_lipschitz,
            loss_sup: inputs.loss_sup,
            radius: inputs.radius,
            data_dim: inputs.data_dim,
            covering_number: covering_number_upper(inputs.radius, g, inputs.data_dim)?,
            bound,
        },
        scaled,
    };
    print_stdout(&(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))
}

fn write_sweep(result: &SweepResult, out_dir: &Path, stem: &str) -> Result<(), CliError> {
    ensure_dir(out_dir)?;
    let csv = out_dir.join(format!("{stem}.csv"));
    result
        .write_csv(create(&csv)?)
        .with_context(|| format!("writing {}", csv.display()))?;
    let json = out_dir.join(format!("{stem}.json"));
    let text = serde_json::to_string_pretty(result).expect("sweep serializes");
    std::fs::write(&json, text + "\n").with_context(|| format!("writing {}", json.display()))?;
    let dat = out_dir.join(format!("{stem}.dat"));
    result
        .write_gnuplot(create(&dat)?)
        .with_context(|| format!("writing {}", dat.display()))?;
    eprintln!("wrote {}, {} and {}", csv.display(), json.display(), dat.display());
    Ok(())
}

pub fn sweep_lambda(config: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let circuit = config.build_circuit()?;
    let obs = config.build_observable()?;
    let (train_set, _) = datasets(config)?;
    let test_set = generalization_test_set(config)?;
    let id = match config.circuit.encoding {
        Encoding::Trainable => "trainable",
        Encoding::Fixed => "fixed",
    };
    eprintln!(
        "lambda sweep over {} values, {} test points",
        config.sweep.lambda_grid.len(),
        test_set.len()
    );
    let sweep = generalization_sweep(
        id,
        &circuit,
        &obs,
        &config.sweep.lambda_grid,
        &config.train_config(),
        &train_set,
        &test_set,
        &|lambda| eprintln!("  lambda {lambda} done"),
    )?;
    write_sweep(&sweep.result, out_dir, "sweep_lambda")
}

pub fn sweep_robustness(config: &ExperimentConfig, models: &[PathBuf], out_dir: &Path) -> Result<(), CliError> {
    let missing: Vec<String> = models
        .iter()
        .filter(|p| !p.is_file())
        .map(|p| p.display().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(anyhow::anyhow!("missing model files: {}", missing.join(", ")).into());
    }
    if models.is_empty() {
        return Err(anyhow::anyhow!("robustness sweep needs model files (sweep.models or --model)").into());
    }
    let entries = models
        .iter()
        .map(|p| {
            let file = ModelFile::load(p)?;
            let (circuit, params, obs) = file.payload.model()?;
            Ok(SweepModel {
                id: file.payload.model_id.clone(),
                lambda: file.payload.lambda,
                circuit,
                params,
                obs,
                train_accuracy: file.payload.train_accuracy,
                seed: file.payload.config.train.seed,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let (_, test_set) = datasets(config)?;
    let s = &config.sweep;
    eprintln!(
        "robustness sweep: {} models, {} noise levels, {} samples per point",
        entries.len(),
        s.eps_grid.len(),
        s.noise_samples
    );
    let result = robustness_sweep(
        &entries,
        &test_set,
        &s.eps_grid,
        s.noise_samples,
        s.noise_seed,
        s.worst_case_mode,
    )?;
    write_sweep(&result, out_dir, "sweep_robustness")
}
