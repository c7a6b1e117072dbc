// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the criterion benchmarks.

use lipsqml_core::model::{build_paper_circuit, Circuit, ModelParams};
use lipsqml_core::{generate_circle_dataset, Dataset, Observable};

/// Paper-shaped circuit with deterministic pseudo-random parameters.
pub fn paper_model(n_qubits: usize, layers: usize) -> (Circuit, ModelParams, Observable) {
    let circuit = build_paper_circuit(n_qubits, layers, 2).expect("valid ansatz");
    let n = circuit.n_rotations();
    let weights = (0..2 * n).map(|i| ((i as f64) * 0.37).sin()).collect();
    let offsets = (0..n).map(|i| ((i as f64) * 1.3).cos() * 3.0).collect();
    let params = ModelParams::new(2, weights, offsets).expect("shapes match");
    (circuit, params, Observable::z_parity(n_qubits))
}

pub fn training_set(n: usize) -> Dataset {
    generate_circle_dataset(n, 7).expect("n > 0")
}
