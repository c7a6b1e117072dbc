// SPDX-License-Identifier: Apache-2.0

//! Fixed-encoding baseline: layers alternate a data block `V(x)` with frozen
//! unit encoding weights and a trainable block `W(phi)` whose angles carry no
//! data dependence.

use super::circuit::{cnot_ring, Circuit, GateOp, TrainMask, TrainableRotation};
use crate::error::{Error, Result};
use crate::qsim::{Observable, Pauli, PauliWord, StateVector};

/// Shape of a fixed-encoding circuit.
///
/// Input component `i` drives a rotation about `data_generators[i]` on every
/// qubit; each qubit then receives one trainable rotation per entry of
/// `trainable_generators`, applied in order.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedEncodingSpec {
    pub n_qubits: usize,
    pub layers: usize,
    pub data_generators: Vec<Pauli>,
    pub trainable_generators: Vec<Pauli>,
}

impl FixedEncodingSpec {
    /// `x_1 -> R_Z`, `x_2 -> R_Y`, then `R_Z R_Y R_Z` with three free angles.
    pub fn paper(n_qubits: usize, layers: usize) -> Self {
        Self {
            n_qubits,
            layers,
            data_generators: vec![Pauli::Z, Pauli::Y],
            trainable_generators: vec![Pauli::Z, Pauli::Y, Pauli::Z],
        }
    }

    pub fn data_dim(&self) -> usize {
        self.data_generators.len()
    }

    /// Number of trainable angles `phi`.
    pub fn n_angles(&self) -> usize {
        self.layers * self.n_qubits * self.trainable_generators.len()
    }

    fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::InvalidArgument(format!(
                "fixed-encoding ansatz needs at least 2 qubits, got {}",
                self.n_qubits
            )));
        }
        if self.layers == 0 || self.data_generators.is_empty() || self.trainable_generators.is_empty() {
            return Err(Error::InvalidArgument(
                "fixed-encoding ansatz needs layers, data generators and trainable generators".into(),
            ));
        }
        Ok(())
    }
}

/// Expresses the fixed-encoding model in the trainable [`Circuit`] type:
/// data gates carry frozen unit weight rows and zero offsets, parameter gates
/// carry frozen zero weights and a trainable offset.
pub fn build_fixed_circuit(spec: &FixedEncodingSpec) -> Result<Circuit> {
    spec.validate()?;
    let d = spec.data_dim();
    let mut ops = Vec::new();
    for _ in 0..spec.layers {
        for q in 0..spec.n_qubits {
            for (i, &g) in spec.data_generators.iter().enumerate() {
                let mut unit = vec![0.0; d];
                unit[i] = 1.0;
                let rot = TrainableRotation::standard(q, g, d).frozen(TrainMask::NONE, unit, 0.0);
                ops.push(GateOp::Rotation(rot));
            }
        }
        for q in 0..spec.n_qubits {
            for &g in &spec.trainable_generators {
                let rot = TrainableRotation::standard(q, g, d).frozen(
                    TrainMask::OFFSET_ONLY,
                    vec![0.0; d],
                    0.0,
                );
                ops.push(GateOp::Rotation(rot));
            }
        }
        ops.extend(cnot_ring(spec.n_qubits));
    }
    Circuit::new(spec.n_qubits, d, ops)
}

/// Direct evaluation of the fixed-encoding model from `(x, phi)` without
/// going through [`Circuit`]. `phi` is ordered layer, qubit, generator.
pub fn fixed_forward(spec: &FixedEncodingSpec, phi: &[f64], x: &[f64], obs: &Observable) -> Result<f64> {
    spec.validate()?;
    if x.len() != spec.data_dim() {
        return Err(Error::Dimension {
            expected: spec.data_dim(),
            got: x.len(),
        });
    }
    if phi.len() != spec.n_angles() {
        return Err(Error::Dimension {
            expected: spec.n_angles(),
            got: phi.len(),
        });
    }
    let mut state = StateVector::zero(spec.n_qubits)?;
    let mut angles = phi.iter();
    for _ in 0..spec.layers {
        for q in 0..spec.n_qubits {
            for (&g, &xi) in spec.data_generators.iter().zip(x) {
                state.apply_pauli_rotation(&PauliWord::single(q, g, 0.5), xi)?;
            }
        }
        for q in 0..spec.n_qubits {
            for &g in &spec.trainable_generators {
                let a = *angles.next().expect("angle count checked");
                state.apply_pauli_rotation(&PauliWord::single(q, g, 0.5), a)?;
            }
        }
        for q in 0..spec.n_qubits {
            state.apply_cnot(q, (q + 1) % spec.n_qubits)?;
        }
    }
    state.expectation(obs)
}
