// SPDX-License-Identifier: Apache-2.0

//! On-disk model format: a deterministic `payload` plus a `created_at`
//! timestamp kept outside of it.

use std::path::Path;

use anyhow::Context;
use lipsqml_core::model::{CircuitDocument, ModelParams};
use lipsqml_core::{Circuit, Observable, PauliWord};
use serde::{Deserialize, Serialize};

use crate::config::{Encoding, ExperimentConfig, ObservableTerm};
use crate::error::CliError;

pub const FORMAT: &str = "lipsqml-model/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelPayload {
    pub format: String,
    pub model_id: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub encoding: Encoding,
    pub lambda: f64,
    pub circuit: CircuitDocument,
    pub observable: Vec<ObservableTerm>,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub best_cost: f64,
    pub best_restart: usize,
    pub best_epoch: usize,
    /// Scaled input space.
    pub lipschitz_tight: f64,
    pub lipschitz_simple: f64,
    /// Raw `[-1, 1]^d` input space.
    pub lipschitz_tight_raw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    /// Seconds since the Unix epoch. Not part of the deterministic payload.
    pub created_at: u64,
    pub payload: ModelPayload,
}

impl ModelFile {
    pub fn new(payload: ModelPayload) -> Self {
        let created_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self { created_at, payload }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading model file {}", path.display()))?;
        let file: ModelFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing model file {}", path.display()))?;
        if file.payload.format != FORMAT {
            return Err(anyhow::anyhow!(
                "model file {} has format {:?}, expected {FORMAT:?}",
                path.display(),
                file.payload.format
            )
            .into());
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("model serializes");
        std::fs::write(path, text + "\n").with_context(|| format!("writing model file {}", path.display()))?;
        Ok(())
    }
}

impl ModelPayload {
    pub fn model(&self) -> Result<(Circuit, ModelParams, Observable), CliError> {
        let (circuit, params) = self.circuit.to_model().context("model circuit")?;
        let obs = self
            .observable
            .iter()
            .map(|t| PauliWord::from_label(&t.pauli, t.coefficient))
            .collect::<lipsqml_core::Result<Vec<_>>>()
            .context("model observable")?;
        let obs = Observable::new(obs);
        obs.check_qubits(circuit.n_qubits()).context("model observable")?;
        Ok((circuit, params, obs))
    }
}
