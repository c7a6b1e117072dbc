// SPDX-License-Identifier: Apache-2.0

//! Dense statevector simulator for few-qubit circuits.
//!
//! Qubits are little-endian: qubit `k` is bit `k` of the basis-state index,
//! so `|q2 q1 q0>` lives at index `q0 + 2 q1 + 4 q2`.

mod pauli;
mod state;

pub use pauli::{Observable, Pauli, PauliWord};
pub use state::StateVector;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 20;

/// Tolerance on `| ||psi|| - 1 |` accepted by [`StateVector::expectation`].
pub const NORM_TOLERANCE: f64 = 1e-8;

pub(crate) use state::{apply_observable, check_cnot, cnot, pauli_matrix_element, rotate};
