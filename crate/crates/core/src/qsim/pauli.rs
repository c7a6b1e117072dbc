// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn label(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_label(c: char) -> Option<Self> {
        match c {
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A real-weighted Pauli string `c * P_{q_1} ... P_{q_k}`.
///
/// Absent qubits carry the identity. The represented operator has spectral
/// norm `|c|` (Pauli strings are unitary and Hermitian).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliWord {
    factors: BTreeMap<usize, Pauli>,
    coefficient: f64,
}

/// Bit masks describing how a Pauli string acts on a computational basis state:
/// `P|b> = i^{n_y} (-1)^{popcount(b & phase_mask)} |b ^ flip_mask>`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PauliMasks {
    pub flip: usize,
    pub phase: usize,
    pub n_y: u32,
}

impl PauliMasks {
    #[inline]
    pub fn sign(&self, basis: usize) -> f64 {
        if (basis & self.phase).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `i^{n_y}` as a complex number.
    #[inline]
    pub fn global(&self) -> Complex64 {
        match self.n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl PauliWord {
    pub fn new(factors: impl IntoIterator<Item = (usize, Pauli)>, coefficient: f64) -> Self {
        Self {
            factors: factors.into_iter().collect(),
            coefficient,
        }
    }

    /// The identity word `c * I`.
    pub fn identity(coefficient: f64) -> Self {
        Self::new([], coefficient)
    }

    /// Single-qubit word `c * P_q`.
    pub fn single(qubit: usize, pauli: Pauli, coefficient: f64) -> Self {
        Self::new([(qubit, pauli)], coefficient)
    }

    /// Parse a dense label such as `"ZIZ"`; character `k` acts on qubit `k`.
    pub fn from_label(label: &str, coefficient: f64) -> Result<Self> {
        let mut factors = BTreeMap::new();
        for (q, c) in label.chars().enumerate() {
            match c {
                'I' | 'i' => {}
                _ => {
                    let p = Pauli::from_label(c).ok_or_else(|| Error::PauliLabel(label.into()))?;
                    factors.insert(q, p);
                }
            }
        }
        Ok(Self {
            factors,
            coefficient,
        })
    }

    /// Dense label over `n_qubits` positions, qubit 0 first.
    pub fn label(&self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|q| self.factors.get(&q).map_or('I', |p| p.label()))
            .collect()
    }

    pub fn factors(&self) -> &BTreeMap<usize, Pauli> {
        &self.factors
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn with_coefficient(&self, coefficient: f64) -> Self {
        Self {
            factors: self.factors.clone(),
            coefficient,
        }
    }

    /// Spectral norm of the represented operator.
    pub fn norm(&self) -> f64 {
        self.coefficient.abs()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// One past the highest qubit index touched, or 0 for the identity.
    pub fn min_qubits(&self) -> usize {
        self.factors.keys().next_back().map_or(0, |q| q + 1)
    }

    pub fn check_qubits(&self, n_qubits: usize) -> Result<()> {
        match self.factors.keys().find(|&&q| q >= n_qubits) {
            Some(&index) => Err(Error::QubitIndex { index, n_qubits }),
            None => Ok(()),
        }
    }

    pub(crate) fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks {
            flip: 0,
            phase: 0,
            n_y: 0,
        };
        for (&q, &p) in &self.factors {
            let bit = 1usize << q;
            match p {
                Pauli::X => m.flip |= bit,
                Pauli::Z => m.phase |= bit,
                Pauli::Y => {
                    m.flip |= bit;
                    m.phase |= bit;
                    m.n_y += 1;
                }
            }
        }
        m
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*", self.coefficient)?;
        if self.factors.is_empty() {
            return write!(f, "I");
        }
        for (i, (q, p)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", p.label(), q)?;
        }
        Ok(())
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next().and_then(Pauli::from_label), chars.next()) {
            (Some(p), None) => Ok(p),
            _ => Err(Error::PauliLabel(s.into())),
        }
    }
}

/// Hermitian observable `M = sum_i c_i P_i`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Observable {
    terms: Vec<PauliWord>,
}

impl Observable {
    pub fn new(terms: Vec<PauliWord>) -> Self {
        Self { terms }
    }

    /// `Z ⊗ Z ⊗ ... ⊗ Z` on `n_qubits` qubits.
    pub fn z_parity(n_qubits: usize) -> Self {
        Self::new(vec![PauliWord::new(
            (0..n_qubits).map(|q| (q, Pauli::Z)),
            1.0,
        )])
    }

    pub fn terms(&self) -> &[PauliWord] {
        &self.terms
    }

    /// `sum_i |c_i|`, an upper bound on the spectral norm.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(PauliWord::norm).sum()
    }

    pub fn min_qubits(&self) -> usize {
        self.terms.iter().map(PauliWord::min_qubits).max().unwrap_or(0)
    }

    pub fn check_qubits(&self, n_qubits: usize) -> Result<()> {
        self.terms.iter().try_for_each(|t| t.check_qubits(n_qubits))
    }

    /// Term-wise sum `self + other`.
    pub fn sum(&self, other: &Observable) -> Observable {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Observable::new(terms)
    }
}

impl From<PauliWord> for Observable {
    fn from(word: PauliWord) -> Self {
        Observable::new(vec![word])
    }
}
