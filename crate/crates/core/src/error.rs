// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulator, model, bound and training routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::qsim::MAX_QUBITS)]
    QubitCount(usize),

    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("CNOT control and target are both qubit {0}")]
    SameQubit(usize),

    #[error("state norm {0} deviates from 1")]
    NotNormalized(f64),

    #[error("expectation value has imaginary residual {0}")]
    ComplexExpectation(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid Pauli label {0:?}")]
    PauliLabel(String),

    #[error("parameter-shift rule requires generator scale 1/2, found {0}")]
    UnsupportedScale(f64),

    #[error("exact spectral norm limited to {max} qubits, observable acts on {got}", max = crate::bounds::EXACT_NORM_MAX_QUBITS)]
    ExactNormTooLarge { got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("angle regularizer applied to a circuit with trainable encoding weights")]
    TrainableEncoding,

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
