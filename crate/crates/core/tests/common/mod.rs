// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

pub mod dense;

use lipsqml_core::model::{GateOp, TrainableRotation};
use lipsqml_core::{Circuit, Observable, Pauli, PauliWord};
use rand::Rng;

pub fn random_pauli<R: Rng>(rng: &mut R) -> Pauli {
    [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)]
}

/// Non-identity Pauli string on `n` qubits with the given coefficient.
pub fn random_word<R: Rng>(rng: &mut R, n: usize, coefficient: f64) -> PauliWord {
    loop {
        let mut factors = Vec::new();
        for q in 0..n {
            if rng.gen_bool(0.6) {
                factors.push((q, random_pauli(rng)));
            }
        }
        if !factors.is_empty() {
            return PauliWord::new(factors, coefficient);
        }
    }
}

pub fn random_observable<R: Rng>(rng: &mut R, n: usize) -> Observable {
    let terms = rng.gen_range(1..=3);
    Observable::new(
        (0..terms)
            .map(|_| {
                let c = rng.gen_range(-1.5..1.5);
                random_word(rng, n, c)
            })
            .collect(),
    )
}

/// Random gate sequence mixing multi-qubit Pauli rotations and CNOTs.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, data_dim: usize, n_ops: usize) -> Circuit {
    let ops = (0..n_ops)
        .map(|_| {
            if n > 1 && rng.gen_bool(0.3) {
                let control = rng.gen_range(0..n);
                let target = (control + rng.gen_range(1..n)) % n;
                GateOp::Cnot { control, target }
            } else {
                let scale = if rng.gen_bool(0.5) { 0.5 } else { rng.gen_range(0.1..1.5) };
                GateOp::Rotation(TrainableRotation::new(random_word(rng, n, 1.0), scale, data_dim))
            }
        })
        .collect();
    Circuit::new(n, data_dim, ops).unwrap()
}

pub fn random_point<R: Rng>(rng: &mut R, d: usize, half_width: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-half_width..=half_width)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `||a - b||_inf / ||b||_inf`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    max_abs_diff(a, b) / scale
}
