// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use lipsqml_core::bench::WorstCaseMode;
use lipsqml_core::model::{build_fixed_circuit, build_paper_circuit, Circuit, FixedEncodingSpec};
use lipsqml_core::train::{Loss, Regularizer, TrainConfig};
use lipsqml_core::{Observable, PauliWord};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const SCHEMA: &str = include_str!("../schema/experiment_config.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    Trainable,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub qubits: usize,
    pub layers: usize,
    pub encoding: Encoding,
}

/// One observable term; character `k` of `pauli` acts on qubit `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableTerm {
    pub pauli: String,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub restarts: usize,
    pub seed: u64,
    pub loss: Loss,
    pub regularizer: Regularizer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub lambda_grid: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub noise_samples: usize,
    pub noise_seed: u64,
    pub worst_case_mode: WorstCaseMode,
    pub n_test_generalization: usize,
    #[serde(default)]
    pub models: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub circuit: CircuitConfig,
    pub observable: Vec<ObservableTerm>,
    pub train: TrainSection,
    pub data: DataConfig,
    pub sweep: SweepConfig,
    pub output_dir: PathBuf,
}

fn grid(step: f64, count: usize) -> Vec<f64> {
    // Rounded so the grid prints as 0.05, 0.1, ... rather than 0.15000000000000002.
    (0..count).map(|i| (i as f64 * step * 1e6).round() / 1e6).collect()
}

impl ExperimentConfig {
    /// 3 qubits, 3 layers, `M = Z⊗Z⊗Z`, 200 training points, learning rate
    /// 0.1, 200 epochs, 9 restarts.
    pub fn paper() -> Self {
        Self {
            circuit: CircuitConfig {
                qubits: 3,
                layers: 3,
                encoding: Encoding::Trainable,
            },
            observable: vec![ObservableTerm {
                pauli: "ZZZ".into(),
                coefficient: 1.0,
            }],
            train: TrainSection {
                lambda: 0.0,
                learning_rate: 0.1,
                epochs: 200,
                restarts: 9,
                seed: 0,
                loss: Loss::Squared,
                regularizer: Regularizer::EncodingNorm,
            },
            data: DataConfig {
                n_train: 200,
                n_test: 1000,
                seed: 0,
                train_file: None,
                test_file: None,
            },
            sweep: SweepConfig {
                lambda_grid: grid(0.05, 11),
                eps_grid: grid(0.02, 11),
                noise_samples: 200,
                noise_seed: 0,
                worst_case_mode: WorstCaseMode::PerPoint,
                n_test_generalization: 10_000,
                models: Vec::new(),
            },
            output_dir: PathBuf::from("results"),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses and validates; errors carry the offending field path.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(path, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let err = |path: &str, msg: &str| Err(CliError::config(path, msg));
        if self.circuit.qubits < 2 || self.circuit.qubits > lipsqml_core::qsim::MAX_QUBITS {
            return err("circuit.qubits", "must lie in 2..=20");
        }
        if self.circuit.layers == 0 {
            return err("circuit.layers", "must be at least 1");
        }
        if self.observable.is_empty() {
            return err("observable", "needs at least one term");
        }
        for (i, term) in self.observable.iter().enumerate() {
            if PauliWord::from_label(&term.pauli, term.coefficient).is_err()
                || term.pauli.chars().count() != self.circuit.qubits
            {
                return err(
                    &format!("observable[{i}].pauli"),
                    "must be a string over I/X/Y/Z with one character per qubit",
                );
            }
            if !term.coefficient.is_finite() {
                return err(&format!("observable[{i}].coefficient"), "must be finite");
            }
        }
        let t = &self.train;
        if !(t.lambda >= 0.0 && t.lambda.is_finite()) {
            return err("train.lambda", "must be a finite number >= 0");
        }
        if !(t.learning_rate > 0.0 && t.learning_rate.is_finite()) {
            return err("train.learning_rate", "must be > 0");
        }
        if t.epochs == 0 {
            return err("train.epochs", "must be at least 1");
        }
        if t.restarts == 0 {
            return err("train.restarts", "must be at least 1");
        }
        if t.regularizer == Regularizer::AngleNorm && self.circuit.encoding == Encoding::Trainable {
            return err("train.regularizer", "angle_norm requires circuit.encoding = fixed");
        }
        if self.data.n_train == 0 {
            return err("data.n_train", "must be at least 1");
        }
        if self.data.n_test == 0 {
            return err("data.n_test", "must be at least 1");
        }
        let s = &self.sweep;
        if s.lambda_grid.is_empty() {
            return err("sweep.lambda_grid", "must not be empty");
        }
        if let Some(i) = s.lambda_grid.iter().position(|l| !(*l >= 0.0 && l.is_finite())) {
            return err(&format!("sweep.lambda_grid[{i}]"), "must be a finite number >= 0");
        }
        if s.eps_grid.is_empty() {
            return err("sweep.eps_grid", "must not be empty");
        }
        if let Some(i) = s.eps_grid.iter().position(|e| !(*e >= 0.0 && e.is_finite())) {
            return err(&format!("sweep.eps_grid[{i}]"), "must be a finite number >= 0");
        }
        if s.noise_samples == 0 {
            return err("sweep.noise_samples", "must be at least 1");
        }
        if s.n_test_generalization == 0 {
            return err("sweep.n_test_generalization", "must be at least 1");
        }
        Ok(())
    }

    pub fn build_circuit(&self) -> lipsqml_core::Result<Circuit> {
        match self.circuit.encoding {
            Encoding::Trainable => build_paper_circuit(self.circuit.qubits, self.circuit.layers, 2),
            Encoding::Fixed => build_fixed_circuit(&FixedEncodingSpec::paper(
                self.circuit.qubits,
                self.circuit.layers,
            )),
        }
    }

    pub fn build_observable(&self) -> lipsqml_core::Result<Observable> {
        self.observable
            .iter()
            .map(|t| PauliWord::from_label(&t.pauli, t.coefficient))
            .collect::<lipsqml_core::Result<Vec<_>>>()
            .map(Observable::new)
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            lambda: t.lambda,
            learning_rate: t.learning_rate,
            epochs: t.epochs,
            restarts: t.restarts,
            seed: t.seed,
            loss: t.loss,
            regularizer: t.regularizer,
        }
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_pretty_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
