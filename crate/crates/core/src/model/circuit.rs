// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use crate::error::{Error, Result};
use crate::qsim::{Pauli, PauliWord};

/// Which halves of a rotation's affine encoding are optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainMask {
    pub weights: bool,
    pub offset: bool,
}

impl TrainMask {
    pub const ALL: TrainMask = TrainMask {
        weights: true,
        offset: true,
    };
    pub const NONE: TrainMask = TrainMask {
        weights: false,
        offset: false,
    };
    pub const OFFSET_ONLY: TrainMask = TrainMask {
        weights: false,
        offset: true,
    };
}

/// Rotation `exp(-i (w^T x + theta) * scale * P)` for a unit Pauli string `P`.
///
/// `frozen_weights` and `frozen_offset` hold the values used for entries the
/// mask marks non-trainable.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainableRotation {
    pub generator: PauliWord,
    pub scale: f64,
    pub mask: TrainMask,
    pub frozen_weights: Vec<f64>,
    pub frozen_offset: f64,
}

impl TrainableRotation {
    /// Fully trainable rotation; the generator's coefficient is dropped.
    pub fn new(generator: PauliWord, scale: f64, data_dim: usize) -> Self {
        Self {
            generator: generator.with_coefficient(1.0),
            scale,
            mask: TrainMask::ALL,
            frozen_weights: vec![0.0; data_dim],
            frozen_offset: 0.0,
        }
    }

    pub fn frozen(mut self, mask: TrainMask, weights: Vec<f64>, offset: f64) -> Self {
        self.mask = mask;
        self.frozen_weights = weights;
        self.frozen_offset = offset;
        self
    }

    /// Standard `R_P(phi) = exp(-i phi P / 2)` on one qubit.
    pub fn standard(qubit: usize, pauli: Pauli, data_dim: usize) -> Self {
        Self::new(PauliWord::single(qubit, pauli, 1.0), 0.5, data_dim)
    }

    /// `H_j = scale * P`.
    pub fn hamiltonian(&self) -> PauliWord {
        self.generator.with_coefficient(self.scale)
    }

    /// `||H_j||`.
    pub fn generator_norm(&self) -> f64 {
        self.scale.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    Rotation(TrainableRotation),
    Cnot { control: usize, target: usize },
}

/// Ordered gate sequence acting on `|0...0>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    data_dim: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize, data_dim: usize, ops: Vec<GateOp>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::qsim::MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        if data_dim == 0 {
            return Err(Error::InvalidArgument("data dimension must be positive".into()));
        }
        for op in &ops {
            match op {
                GateOp::Rotation(rot) => {
                    rot.generator.check_qubits(n_qubits)?;
                    if rot.frozen_weights.len() != data_dim {
                        return Err(Error::Dimension {
                            expected: data_dim,
                            got: rot.frozen_weights.len(),
                        });
                    }
                    if !rot.scale.is_finite() {
                        return Err(Error::InvalidArgument("non-finite generator scale".into()));
                    }
                }
                GateOp::Cnot { control, target } => {
                    crate::qsim::check_cnot(n_qubits, *control, *target)?
                }
            }
        }
        Ok(Self {
            n_qubits,
            data_dim,
            ops,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn data_dim(&self) -> usize {
        self.data_dim
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn rotations(&self) -> impl Iterator<Item = &TrainableRotation> + '_ {
        self.ops.iter().filter_map(|op| match op {
            GateOp::Rotation(r) => Some(r),
            GateOp::Cnot { .. } => None,
        })
    }

    /// Number of rotations `N`.
    pub fn n_rotations(&self) -> usize {
        self.rotations().count()
    }

    pub fn n_cnots(&self) -> usize {
        self.ops.len() - self.n_rotations()
    }

    /// True when any rotation has trainable encoding weights.
    pub fn has_trainable_encoding(&self) -> bool {
        self.rotations().any(|r| r.mask.weights)
    }

    pub(crate) fn check_angles(&self, angles: &[f64]) -> Result<()> {
        let n = self.n_rotations();
        if angles.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: angles.len(),
            });
        }
        Ok(())
    }
}

/// `w^T x + theta`.
pub fn encode_angle(w: &[f64], theta: f64, x: &[f64]) -> Result<f64> {
    if w.len() != x.len() {
        return Err(Error::Dimension {
            expected: w.len(),
            got: x.len(),
        });
    }
    Ok(w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + theta)
}

/// Encoding weights `W` (N x d, row-major) and offsets `Omega` (length N).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    data_dim: usize,
    weights: Vec<f64>,
    offsets: Vec<f64>,
}

impl ModelParams {
    pub fn new(data_dim: usize, weights: Vec<f64>, offsets: Vec<f64>) -> Result<Self> {
        if weights.len() != offsets.len() * data_dim {
            return Err(Error::Dimension {
                expected: offsets.len() * data_dim,
                got: weights.len(),
            });
        }
        Ok(Self {
            data_dim,
            weights,
            offsets,
        })
    }

    /// All-zero parameters; frozen entries are not applied.
    pub fn zeros(circuit: &Circuit) -> Self {
        let n = circuit.n_rotations();
        Self {
            data_dim: circuit.data_dim(),
            weights: vec![0.0; n * circuit.data_dim()],
            offsets: vec![0.0; n],
        }
    }

    /// Frozen values everywhere, zero for trainable entries.
    pub fn defaults(circuit: &Circuit) -> Self {
        let mut p = Self::zeros(circuit);
        p.apply_frozen(circuit);
        p
    }

    /// Random initialization: trainable offsets uniform in `[-pi, pi]`,
    /// trainable weights uniform in `[-1, 1]`, frozen entries from the circuit.
    pub fn random<R: Rng + ?Sized>(circuit: &Circuit, rng: &mut R) -> Self {
        use std::f64::consts::PI;
        let mut p = Self::zeros(circuit);
        let d = circuit.data_dim();
        for (j, rot) in circuit.rotations().enumerate() {
            for k in 0..d {
                p.weights[j * d + k] = if rot.mask.weights {
                    rng.gen_range(-1.0..=1.0)
                } else {
                    rot.frozen_weights[k]
                };
            }
            p.offsets[j] = if rot.mask.offset {
                rng.gen_range(-PI..=PI)
            } else {
                rot.frozen_offset
            };
        }
        p
    }

    /// Overwrites non-trainable entries with the circuit's frozen values.
    pub fn apply_frozen(&mut self, circuit: &Circuit) {
        let d = self.data_dim;
        for (j, rot) in circuit.rotations().enumerate() {
            if !rot.mask.weights {
                self.weights[j * d..(j + 1) * d].copy_from_slice(&rot.frozen_weights);
            }
            if !rot.mask.offset {
                self.offsets[j] = rot.frozen_offset;
            }
        }
    }

    pub fn data_dim(&self) -> usize {
        self.data_dim
    }

    pub fn n_rotations(&self) -> usize {
        self.offsets.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn offsets_mut(&mut self) -> &mut [f64] {
        &mut self.offsets
    }

    /// Row `w_j`.
    pub fn weight_row(&self, j: usize) -> &[f64] {
        &self.weights[j * self.data_dim..(j + 1) * self.data_dim]
    }

    pub fn weight_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.weights.chunks_exact(self.data_dim)
    }

    pub fn check_circuit(&self, circuit: &Circuit) -> Result<()> {
        if self.data_dim != circuit.data_dim() {
            return Err(Error::Dimension {
                expected: circuit.data_dim(),
                got: self.data_dim,
            });
        }
        let n = circuit.n_rotations();
        if self.offsets.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: self.offsets.len(),
            });
        }
        Ok(())
    }

    /// Rotation angles `w_j^T x + theta_j` for every rotation.
    pub fn angles(&self, circuit: &Circuit, x: &[f64]) -> Result<Vec<f64>> {
        self.check_circuit(circuit)?;
        if x.len() != self.data_dim {
            return Err(Error::Dimension {
                expected: self.data_dim,
                got: x.len(),
            });
        }
        Ok(self
            .weight_rows()
            .zip(&self.offsets)
            .map(|(w, &theta)| w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + theta)
            .collect())
    }
}

/// Data re-uploading ansatz: per layer and qubit an `R_Z` then an `R_Y`
/// rotation with trainable affine angles, followed by a CNOT ring
/// `q -> (q + 1) mod n`.
pub fn build_paper_circuit(n_qubits: usize, layers: usize, data_dim: usize) -> Result<Circuit> {
    if n_qubits < 2 {
        return Err(Error::InvalidArgument(format!(
            "ansatz needs at least 2 qubits, got {n_qubits}"
        )));
    }
    if layers == 0 {
        return Err(Error::InvalidArgument("ansatz needs at least one layer".into()));
    }
    let mut ops = Vec::with_capacity(layers * 3 * n_qubits);
    for _ in 0..layers {
        for q in 0..n_qubits {
            ops.push(GateOp::Rotation(TrainableRotation::standard(q, Pauli::Z, data_dim)));
            ops.push(GateOp::Rotation(TrainableRotation::standard(q, Pauli::Y, data_dim)));
        }
        ops.extend(cnot_ring(n_qubits));
    }
    Circuit::new(n_qubits, data_dim, ops)
}

pub(crate) fn cnot_ring(n_qubits: usize) -> impl Iterator<Item = GateOp> {
    (0..n_qubits).map(move |q| GateOp::Cnot {
        control: q,
        target: (q + 1) % n_qubits,
    })
}
