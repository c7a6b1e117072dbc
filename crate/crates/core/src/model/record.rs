// SPDX-License-Identifier: Apache-2.0

//! JSON-facing representation of a circuit together with its parameters.

use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, GateOp, ModelParams, TrainMask, TrainableRotation};
use crate::error::{Error, Result};
use crate::qsim::{Pauli, PauliWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Rotation,
    Cnot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainMaskRecord {
    pub w: bool,
    pub theta: bool,
}

/// One gate. For rotations `generator[k]` acts on `qubits[k]`; for CNOTs
/// `qubits` is `[control, target]` and the rotation fields are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpRecord {
    pub kind: OpKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trainable_mask: Option<TrainMaskRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDocument {
    pub n_qubits: usize,
    pub data_dim: usize,
    pub ops: Vec<OpRecord>,
}

impl CircuitDocument {
    pub fn from_model(circuit: &Circuit, params: &ModelParams) -> Result<Self> {
        params.check_circuit(circuit)?;
        let mut j = 0;
        let ops = circuit
            .ops()
            .iter()
            .map(|op| match op {
                GateOp::Cnot { control, target } => OpRecord {
                    kind: OpKind::Cnot,
                    qubits: vec![*control, *target],
                    generator: None,
                    scale: None,
                    w: None,
                    theta: None,
                    trainable_mask: None,
                },
                GateOp::Rotation(rot) => {
                    let (qubits, labels): (Vec<usize>, String) = rot
                        .generator
                        .factors()
                        .iter()
                        .map(|(&q, p)| (q, p.label()))
                        .unzip();
                    let rec = OpRecord {
                        kind: OpKind::Rotation,
                        qubits,
                        generator: Some(labels),
                        scale: Some(rot.scale),
                        w: Some(params.weight_row(j).to_vec()),
                        theta: Some(params.offsets()[j]),
                        trainable_mask: Some(TrainMaskRecord {
                            w: rot.mask.weights,
                            theta: rot.mask.offset,
                        }),
                    };
                    j += 1;
                    rec
                }
            })
            .collect();
        Ok(Self {
            n_qubits: circuit.n_qubits(),
            data_dim: circuit.data_dim(),
            ops,
        })
    }

    /// Rebuilds the circuit and parameters. Stored values of masked entries
    /// become the circuit's frozen values.
    pub fn to_model(&self) -> Result<(Circuit, ModelParams)> {
        let d = self.data_dim;
        let mut ops = Vec::with_capacity(self.ops.len());
        let mut weights = Vec::new();
        let mut offsets = Vec::new();
        for (i, rec) in self.ops.iter().enumerate() {
            let bad = |what: &str| Error::InvalidArgument(format!("ops[{i}]: {what}"));
            match rec.kind {
                OpKind::Cnot => {
                    let [control, target] = rec.qubits[..] else {
                        return Err(bad("cnot needs exactly two qubits"));
                    };
                    ops.push(GateOp::Cnot { control, target });
                }
                OpKind::Rotation => {
                    let labels = rec.generator.as_deref().ok_or_else(|| bad("missing generator"))?;
                    let paulis = labels
                        .chars()
                        .map(|c| Pauli::from_label(c).ok_or_else(|| bad("invalid generator label")))
                        .collect::<Result<Vec<_>>>()?;
                    if paulis.len() != rec.qubits.len() {
                        return Err(bad("generator length differs from qubit list"));
                    }
                    let word = PauliWord::new(rec.qubits.iter().copied().zip(paulis), 1.0);
                    if word.factors().len() != rec.qubits.len() {
                        return Err(bad("repeated qubit in generator"));
                    }
                    let scale = rec.scale.ok_or_else(|| bad("missing scale"))?;
                    let w = rec.w.clone().ok_or_else(|| bad("missing w"))?;
                    if w.len() != d {
                        return Err(bad("w length differs from data_dim"));
                    }
                    let theta = rec.theta.ok_or_else(|| bad("missing theta"))?;
                    let mask = rec.trainable_mask.ok_or_else(|| bad("missing trainable_mask"))?;
                    let rot = TrainableRotation::new(word, scale, d).frozen(
                        TrainMask {
                            weights: mask.w,
                            offset: mask.theta,
                        },
                        w.clone(),
                        theta,
                    );
                    weights.extend(w);
                    offsets.push(theta);
                    ops.push(GateOp::Rotation(rot));
                }
            }
        }
        let circuit = Circuit::new(self.n_qubits, d, ops)?;
        let params = ModelParams::new(d, weights, offsets)?;
        Ok((circuit, params))
    }
}
