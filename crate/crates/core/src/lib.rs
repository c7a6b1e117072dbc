// SPDX-License-Identifier: Apache-2.0

//! Trainable-encoding variational quantum classifiers on a dense statevector
//! simulator, with closed-form Lipschitz and generalization bounds and
//! Lipschitz-regularized training.
//!
//! Modules build on each other bottom-up:
//! [`qsim`] → [`model`] → [`grad`] → [`bounds`] → [`train`] → [`bench`].

pub mod bench;
pub mod bounds;
pub mod error;
pub mod grad;
pub mod model;
pub mod qsim;
pub mod train;

pub use bench::{generate_circle_dataset, Dataset, SweepRecord, SweepResult, WorstCaseMode};
pub use bounds::{BoundReport, DomainConvention, GenBoundInputs, Gamma};
pub use error::{Error, Result};
pub use grad::Gradient;
pub use model::{
    build_fixed_circuit, build_paper_circuit, forward, predict, Circuit, FixedEncodingSpec, ModelParams,
};
pub use qsim::{Observable, Pauli, PauliWord, StateVector};
pub use train::{train, Regularizer, TrainConfig, TrainResult};
