// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use super::pauli::{Observable, PauliMasks, PauliWord};
use super::{MAX_QUBITS, NORM_TOLERANCE};
use crate::error::{Error, Result};

const IMAG_TOLERANCE: f64 = 1e-10;

/// Pure state of an `n`-qubit register as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wrap raw amplitudes. The length must be a power of two; the caller is
    /// responsible for normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Applies `exp(-i * angle * H)` with `H = word` (coefficient included).
    pub fn apply_pauli_rotation(&mut self, word: &PauliWord, angle: f64) -> Result<()> {
        word.check_qubits(self.n_qubits)?;
        rotate(&mut self.amps, word.masks(), angle * word.coefficient());
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        check_cnot(self.n_qubits, control, target)?;
        cnot(&mut self.amps, control, target);
        Ok(())
    }

    /// `<psi|M|psi>`. Fails if the state is not normalized or the result
    /// carries an imaginary part beyond round-off.
    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        obs.check_qubits(self.n_qubits)?;
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        let value = expectation_raw(&self.amps, obs);
        if value.im.abs() > IMAG_TOLERANCE {
            return Err(Error::ComplexExpectation(value.im));
        }
        Ok(value.re)
    }
}

pub(crate) fn check_cnot(n_qubits: usize, control: usize, target: usize) -> Result<()> {
    for index in [control, target] {
        if index >= n_qubits {
            return Err(Error::QubitIndex { index, n_qubits });
        }
    }
    if control == target {
        return Err(Error::SameQubit(control));
    }
    Ok(())
}

/// In-place `exp(-i phi P)` = `cos(phi) I - i sin(phi) P` for a unit Pauli string.
pub(crate) fn rotate(amps: &mut [Complex64], masks: PauliMasks, phi: f64) {
    let (s, c) = phi.sin_cos();
    // -i * sin(phi) * i^{n_y}
    let off = Complex64::new(0.0, -s) * masks.global();
    if masks.flip == 0 {
        for (b, a) in amps.iter_mut().enumerate() {
            *a *= c + off * masks.sign(b);
        }
        return;
    }
    for b in 0..amps.len() {
        let partner = b ^ masks.flip;
        if partner < b {
            continue;
        }
        let (lo, hi) = (amps[b], amps[partner]);
        // (P psi)[b] = i^{n_y} sign(b ^ flip) psi[b ^ flip]
        amps[b] = lo * c + off * masks.sign(partner) * hi;
        amps[partner] = hi * c + off * masks.sign(b) * lo;
    }
}

pub(crate) fn cnot(amps: &mut [Complex64], control: usize, target: usize) {
    let cbit = 1usize << control;
    let tbit = 1usize << target;
    for b in 0..amps.len() {
        if b & cbit != 0 && b & tbit == 0 {
            amps.swap(b, b | tbit);
        }
    }
}

/// `out += coefficient * P psi`.
pub(crate) fn accumulate_pauli(out: &mut [Complex64], psi: &[Complex64], word: &PauliWord) {
    let masks = word.masks();
    let g = masks.global() * word.coefficient();
    for (b, o) in out.iter_mut().enumerate() {
        let src = b ^ masks.flip;
        *o += g * masks.sign(src) * psi[src];
    }
}

/// `M psi` for an observable, as an unnormalized amplitude buffer.
pub(crate) fn apply_observable(psi: &[Complex64], obs: &Observable) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for term in obs.terms() {
        accumulate_pauli(&mut out, psi, term);
    }
    out
}

/// `<bra| P |ket>` for a unit-coefficient Pauli string given by its masks.
pub(crate) fn pauli_matrix_element(bra: &[Complex64], masks: PauliMasks, ket: &[Complex64]) -> Complex64 {
    let g = masks.global();
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, br) in bra.iter().enumerate() {
        let src = b ^ masks.flip;
        acc += br.conj() * ket[src] * masks.sign(src);
    }
    acc * g
}

pub(crate) fn expectation_raw(psi: &[Complex64], obs: &Observable) -> Complex64 {
    obs.terms()
        .iter()
        .map(|t| pauli_matrix_element(psi, t.masks(), psi) * t.coefficient())
        .sum()
}
