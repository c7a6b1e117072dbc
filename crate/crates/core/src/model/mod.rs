// SPDX-License-Identifier: Apache-2.0

//! Trainable-encoding circuits `f(x) = <0|U(x)^† M U(x)|0>` where every
//! rotation angle is an affine function `w_j^T x + theta_j` of the input.

mod circuit;
mod fixed;
mod record;

pub use circuit::{
    build_paper_circuit, encode_angle, Circuit, GateOp, ModelParams, TrainMask, TrainableRotation,
};
pub use fixed::{build_fixed_circuit, fixed_forward, FixedEncodingSpec};
pub use record::{CircuitDocument, OpKind, OpRecord, TrainMaskRecord};

use crate::error::Result;
use crate::qsim::{Observable, StateVector};

/// Class label, `+1` or `-1`.
pub type Label = i8;

/// Evaluates the model output for input `x` (already in angle space).
pub fn forward(circuit: &Circuit, params: &ModelParams, x: &[f64], obs: &Observable) -> Result<f64> {
    let angles = params.angles(circuit, x)?;
    forward_angles(circuit, &angles, obs)
}

/// Evaluates the circuit with explicit rotation angles, one per rotation.
pub fn forward_angles(circuit: &Circuit, angles: &[f64], obs: &Observable) -> Result<f64> {
    let state = prepare_state(circuit, angles)?;
    state.expectation(obs)
}

/// `U(angles)|0>`.
pub fn prepare_state(circuit: &Circuit, angles: &[f64]) -> Result<StateVector> {
    circuit.check_angles(angles)?;
    let mut state = StateVector::zero(circuit.n_qubits())?;
    let mut j = 0;
    for op in circuit.ops() {
        match op {
            GateOp::Rotation(rot) => {
                state.apply_pauli_rotation(&rot.hamiltonian(), angles[j])?;
                j += 1;
            }
            GateOp::Cnot { control, target } => state.apply_cnot(*control, *target)?,
        }
    }
    Ok(state)
}

/// Decision rule `sign(f)`, with `sign(0) = +1`.
pub fn predict(circuit: &Circuit, params: &ModelParams, x: &[f64], obs: &Observable) -> Result<Label> {
    forward(circuit, params, x, obs).map(label_of)
}

/// Sign of a model output with the `+1` tie-break.
pub fn label_of(output: f64) -> Label {
    if output >= 0.0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{Pauli, PauliWord};

    #[test]
    fn tie_break_is_positive() {
        assert_eq!(label_of(0.73), 1);
        assert_eq!(label_of(-0.1), -1);
        assert_eq!(label_of(0.0), 1);
        assert_eq!(label_of(-0.0), 1);
    }

    #[test]
    fn single_ry_gives_cosine() {
        let circuit = Circuit::new(
            1,
            2,
            vec![GateOp::Rotation(TrainableRotation::new(
                PauliWord::single(0, Pauli::Y, 1.0),
                0.5,
                2,
            ))],
        )
        .unwrap();
        let params = ModelParams::new(2, vec![1.0, 0.0], vec![0.0]).unwrap();
        let z = Observable::from(PauliWord::single(0, Pauli::Z, 1.0));
        for a in [-2.0, -0.3, 0.0, 0.9, 3.0] {
            let f = forward(&circuit, &params, &[a, 17.0], &z).unwrap();
            assert!((f - f64::cos(a)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_params_give_plus_one() {
        let circuit = build_paper_circuit(3, 3, 2).unwrap();
        let params = ModelParams::zeros(&circuit);
        let obs = Observable::z_parity(3);
        for x in [[0.0, 0.0], [1.3, -2.9], [-3.1, 3.1]] {
            assert!((forward(&circuit, &params, &x, &obs).unwrap() - 1.0).abs() < 1e-14);
            assert_eq!(predict(&circuit, &params, &x, &obs).unwrap(), 1);
        }
    }

    #[test]
    fn forward_checks_input_dimension() {
        let circuit = build_paper_circuit(2, 1, 2).unwrap();
        let params = ModelParams::zeros(&circuit);
        assert!(forward(&circuit, &params, &[1.0], &Observable::z_parity(2)).is_err());
    }
}
