// SPDX-License-Identifier: Apache-2.0

//! Dense-matrix reference simulator: Kronecker products of 2x2 Paulis and
//! a Taylor-series matrix exponential. Shares no code with the statevector
//! kernels under test.

#![allow(dead_code)]

use lipsqml_core::model::GateOp;
use lipsqml_core::{Circuit, Observable, Pauli, PauliWord};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type Mat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(p: Pauli) -> Mat {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::X => Mat::from_row_slice(2, 2, &[z, one, one, z]),
        Pauli::Y => Mat::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => Mat::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

/// Tensor product with qubit `n-1` leftmost, so qubit `k` is bit `k` of
/// the basis index.
pub fn embed(mut factor: impl FnMut(usize) -> Mat, n: usize) -> Mat {
    let mut out = Mat::identity(1, 1);
    for q in (0..n).rev() {
        out = out.kronecker(&factor(q));
    }
    out
}

pub fn word(w: &PauliWord, n: usize) -> Mat {
    embed(
        |q| w.factors().get(&q).map_or_else(|| Mat::identity(2, 2), |&p| pauli(p)),
        n,
    ) * c(w.coefficient(), 0.0)
}

pub fn observable(obs: &Observable, n: usize) -> Mat {
    let dim = 1 << n;
    obs.terms().iter().fold(Mat::zeros(dim, dim), |acc, t| acc + word(t, n))
}

/// `|0><0|_c (x) I + |1><1|_c (x) X_t`.
pub fn cnot(control: usize, target: usize, n: usize) -> Mat {
    let p0 = Mat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let p1 = Mat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    let a = embed(|q| if q == control { p0.clone() } else { Mat::identity(2, 2) }, n);
    let b = embed(
        |q| {
            if q == control {
                p1.clone()
            } else if q == target {
                pauli(Pauli::X)
            } else {
                Mat::identity(2, 2)
            }
        },
        n,
    );
    a + b
}

/// `exp(a)` by scaling and squaring around a truncated Taylor series.
pub fn expm(a: &Mat) -> Mat {
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a * c(scale, 0.0);
    let dim = a.nrows();
    let mut term = Mat::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..=24 {
        term = &term * &a * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Product of gate matrices for the given rotation angles.
pub fn unitary(circuit: &Circuit, angles: &[f64]) -> Mat {
    let n = circuit.n_qubits();
    let dim = 1 << n;
    let mut u = Mat::identity(dim, dim);
    let mut j = 0;
    for op in circuit.ops() {
        let g = match op {
            GateOp::Rotation(r) => {
                let h = word(&r.generator, n) * c(r.scale * angles[j], 0.0);
                j += 1;
                expm(&(h * c(0.0, -1.0)))
            }
            GateOp::Cnot { control, target } => cnot(*control, *target, n),
        };
        u = g * u;
    }
    u
}

pub fn state(circuit: &Circuit, angles: &[f64]) -> Vec<Complex64> {
    unitary(circuit, angles).column(0).iter().copied().collect()
}

pub fn expectation(circuit: &Circuit, angles: &[f64], obs: &Observable) -> f64 {
    let psi = nalgebra::DVector::from_vec(state(circuit, angles));
    let m = observable(obs, circuit.n_qubits());
    (psi.adjoint() * m * &psi)[(0, 0)].re
}
