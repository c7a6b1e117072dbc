// SPDX-License-Identifier: Apache-2.0

//! Gradients of the model output with respect to rotation angles and to the
//! affine encoding parameters `(W, Omega)`.
//!
//! The production path is adjoint differentiation: one forward sweep to build
//! `|psi> = U|0>` and `|lambda> = M|psi>`, then one backward sweep undoing each
//! gate on both buffers. At rotation `j` with `H_j = s P`,
//! `df/dphi_j = 2 s Im <lambda|P|psi>`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::model::{forward_angles, prepare_state, Circuit, GateOp, ModelParams};
use crate::qsim::{apply_observable, cnot, pauli_matrix_element, rotate, Observable};

/// Central finite-difference step used by the validation oracle.
pub const FD_STEP: f64 = 1e-5;

/// Gradient with respect to `W` (row-major, N x d) and `Omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<f64>,
    pub offsets: Vec<f64>,
}

impl Gradient {
    pub fn zeros(n_rotations: usize, data_dim: usize) -> Self {
        Self {
            weights: vec![0.0; n_rotations * data_dim],
            offsets: vec![0.0; n_rotations],
        }
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &Gradient, scale: f64) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += scale * b;
        }
        for (a, b) in self.offsets.iter_mut().zip(&other.offsets) {
            *a += scale * b;
        }
    }
}

/// `df/dphi_j` for every rotation, by adjoint differentiation.
pub fn angle_gradients_adjoint(
    circuit: &Circuit,
    params: &ModelParams,
    x: &[f64],
    obs: &Observable,
) -> Result<Vec<f64>> {
    let angles = params.angles(circuit, x)?;
    value_and_angle_gradients(circuit, &angles, obs).map(|(_, g)| g)
}

/// Model output and `df/dphi_j` at explicit angles, in one forward and one
/// backward sweep.
pub fn value_and_angle_gradients(
    circuit: &Circuit,
    angles: &[f64],
    obs: &Observable,
) -> Result<(f64, Vec<f64>)> {
    obs.check_qubits(circuit.n_qubits())?;
    let state = prepare_state(circuit, angles)?;
    let value = state.expectation(obs)?;
    let mut psi = state.into_amplitudes();
    let mut lambda = apply_observable(&psi, obs);

    let mut grads = vec![0.0; angles.len()];
    let mut j = angles.len();
    for op in circuit.ops().iter().rev() {
        match op {
            GateOp::Rotation(rot) => {
                j -= 1;
                let masks = rot.generator.masks();
                grads[j] = 2.0 * rot.scale * pauli_matrix_element(&lambda, masks, &psi).im;
                let undo = -angles[j] * rot.scale;
                rotate(&mut psi, masks, undo);
                rotate(&mut lambda, masks, undo);
            }
            GateOp::Cnot { control, target } => {
                cnot(&mut psi, *control, *target);
                cnot(&mut lambda, *control, *target);
            }
        }
    }
    Ok((value, grads))
}

/// Pushes angle gradients through `phi_j = w_j^T x + theta_j`, zeroing
/// entries the circuit marks non-trainable.
pub fn chain_rule(circuit: &Circuit, angle_grads: &[f64], x: &[f64]) -> Gradient {
    let d = circuit.data_dim();
    let mut g = Gradient::zeros(angle_grads.len(), d);
    for (j, (rot, &gj)) in circuit.rotations().zip(angle_grads).enumerate() {
        if rot.mask.weights {
            for (dw, xi) in g.weights[j * d..(j + 1) * d].iter_mut().zip(x) {
                *dw = gj * xi;
            }
        }
        if rot.mask.offset {
            g.offsets[j] = gj;
        }
    }
    g
}

/// Gradient of `f(x)` with respect to all trainable `(W, Omega)` entries.
pub fn full_gradient(circuit: &Circuit, params: &ModelParams, x: &[f64], obs: &Observable) -> Result<Gradient> {
    let angle_grads = angle_gradients_adjoint(circuit, params, x, obs)?;
    Ok(chain_rule(circuit, &angle_grads, x))
}

/// Parameter-shift rule `[f(phi + pi/2) - f(phi - pi/2)] / 2`, valid for
/// generators `P/2`. Kept as an independent cross-check.
pub fn angle_gradients_parameter_shift(
    circuit: &Circuit,
    params: &ModelParams,
    x: &[f64],
    obs: &Observable,
) -> Result<Vec<f64>> {
    if let Some(rot) = circuit.rotations().find(|r| r.scale != 0.5) {
        return Err(Error::UnsupportedScale(rot.scale));
    }
    let angles = params.angles(circuit, x)?;
    shifted_differences(circuit, &angles, obs, FRAC_PI_2, 0.5)
}

/// Central finite differences `[f(phi + h) - f(phi - h)] / 2h`.
pub fn angle_gradients_finite_difference(
    circuit: &Circuit,
    params: &ModelParams,
    x: &[f64],
    obs: &Observable,
    step: f64,
) -> Result<Vec<f64>> {
    let angles = params.angles(circuit, x)?;
    shifted_differences(circuit, &angles, obs, step, 0.5 / step)
}

fn shifted_differences(
    circuit: &Circuit,
    angles: &[f64],
    obs: &Observable,
    shift: f64,
    factor: f64,
) -> Result<Vec<f64>> {
    let mut work = angles.to_vec();
    (0..angles.len())
        .map(|j| {
            work[j] = angles[j] + shift;
            let plus = forward_angles(circuit, &work, obs)?;
            work[j] = angles[j] - shift;
            let minus = forward_angles(circuit, &work, obs)?;
            work[j] = angles[j];
            Ok(factor * (plus - minus))
        })
        .collect()
}
