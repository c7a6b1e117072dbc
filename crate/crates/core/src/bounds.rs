// SPDX-License-Identifier: Apache-2.0

//! Closed-form Lipschitz bounds of the model and the resulting
//! generalization bound.
//!
//! For `f(x) = <0|U(x)^† M U(x)|0>` with angles `w_j^T x + theta_j` and
//! generators `H_j`:
//!
//! * tight:  `L = 2 ||M|| sum_j ||w_j|| ||H_j||`
//! * simple: `L = 2 ||M|| ||W|| sum_j ||H_j||` with `||W||` the largest
//!   singular value of the stacked weights.
//!
//! Neither depends on the offsets `theta_j`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Circuit, ModelParams};
use crate::qsim::{apply_observable, Observable};

/// Largest register for which [`NormMode::Exact`] builds the dense operator.
pub const EXACT_NORM_MAX_QUBITS: usize = 12;

/// Sup of the squared loss `(y - f)^2` over `y in {-1, 1}`, `f in [-1, 1]`.
pub const DEFAULT_LOSS_SUP: f64 = 4.0;

/// Lipschitz constant of the squared loss on the same domain, `4 sqrt(2)`.
pub const DEFAULT_LOSS_LIPSCHITZ: f64 = 4.0 * std::f64::consts::SQRT_2;

/// Slope of the `[-1, 1] -> [-pi, pi]` input preprocessing.
pub const PREPROCESSING_SLOPE: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    /// Largest absolute eigenvalue of the dense matrix.
    Exact,
    /// `sum_i |c_i|`.
    Upper,
}

/// Spectral norm of an observable.
pub fn spectral_norm(obs: &Observable, mode: NormMode) -> Result<f64> {
    match mode {
        NormMode::Upper => Ok(obs.coefficient_l1()),
        NormMode::Exact => {
            let n = obs.min_qubits().max(1);
            if n > EXACT_NORM_MAX_QUBITS {
                return Err(Error::ExactNormTooLarge { got: n });
            }
            if let [term] = obs.terms() {
                return Ok(term.norm());
            }
            if obs.terms().is_empty() {
                return Ok(0.0);
            }
            let dim = 1usize << n;
            let mut dense = DMatrix::<Complex64>::zeros(dim, dim);
            let mut basis = vec![Complex64::new(0.0, 0.0); dim];
            for col in 0..dim {
                basis[col] = Complex64::new(1.0, 0.0);
                for (row, v) in apply_observable(&basis, obs).into_iter().enumerate() {
                    dense[(row, col)] = v;
                }
                basis[col] = Complex64::new(0.0, 0.0);
            }
            let eig = dense.symmetric_eigenvalues();
            Ok(eig.iter().fold(0.0, |m: f64, v| m.max(v.abs())))
        }
    }
}

/// `||M||`, exact where the register is small enough, otherwise the
/// coefficient sum (still a valid, possibly looser, bound).
pub fn observable_norm(obs: &Observable) -> f64 {
    spectral_norm(obs, NormMode::Exact).unwrap_or_else(|_| obs.coefficient_l1())
}

/// `||w_j|| * ||H_j||` for every rotation.
pub fn per_gate_terms(circuit: &Circuit, params: &ModelParams) -> Result<Vec<f64>> {
    params.check_circuit(circuit)?;
    Ok(circuit
        .rotations()
        .zip(params.weight_rows())
        .map(|(rot, w)| l2(w) * rot.generator_norm())
        .collect())
}

/// `2 ||M|| sum_j ||w_j|| ||H_j||`.
pub fn lipschitz_tight(circuit: &Circuit, params: &ModelParams, obs: &Observable) -> Result<f64> {
    let terms = per_gate_terms(circuit, params)?;
    Ok(2.0 * observable_norm(obs) * terms.iter().sum::<f64>())
}

/// `2 ||M|| sigma_max(W) sum_j ||H_j||`.
pub fn lipschitz_simple(circuit: &Circuit, params: &ModelParams, obs: &Observable) -> Result<f64> {
    params.check_circuit(circuit)?;
    let generator_sum: f64 = circuit.rotations().map(|r| r.generator_norm()).sum();
    Ok(2.0 * observable_norm(obs) * weight_spectral_norm(params) * generator_sum)
}

/// Largest singular value of the stacked weight matrix.
pub fn weight_spectral_norm(params: &ModelParams) -> f64 {
    if params.n_rotations() == 0 {
        return 0.0;
    }
    let w = DMatrix::from_row_slice(params.n_rotations(), params.data_dim(), params.weights());
    w.singular_values().max()
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainConvention {
    /// Inputs in `[-1, 1]^d`, before preprocessing.
    RawDataSpace,
    /// Inputs in `[-pi, pi]^d`, where the circuit consumes them.
    ScaledDataSpace,
}

/// Both Lipschitz bounds with their ingredients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lipschitz_tight: f64,
    pub lipschitz_simple: f64,
    pub obs_norm: f64,
    pub per_gate_terms: Vec<f64>,
    pub domain_convention: DomainConvention,
}

impl BoundReport {
    /// Bounds in the space the circuit consumes (scaled inputs).
    pub fn compute(circuit: &Circuit, params: &ModelParams, obs: &Observable) -> Result<Self> {
        let per_gate_terms = per_gate_terms(circuit, params)?;
        let obs_norm = observable_norm(obs);
        Ok(Self {
            lipschitz_tight: 2.0 * obs_norm * per_gate_terms.iter().sum::<f64>(),
            lipschitz_simple: lipschitz_simple(circuit, params, obs)?,
            obs_norm,
            per_gate_terms,
            domain_convention: DomainConvention::ScaledDataSpace,
        })
    }

    /// The same bounds measured against raw inputs: every weight row is
    /// effectively multiplied by the preprocessing slope.
    pub fn to_raw_space(&self) -> Self {
        match self.domain_convention {
            DomainConvention::RawDataSpace => self.clone(),
            DomainConvention::ScaledDataSpace => {
                let s = PREPROCESSING_SLOPE;
                Self {
                    lipschitz_tight: self.lipschitz_tight * s,
                    lipschitz_simple: self.lipschitz_simple * s,
                    obs_norm: self.obs_norm,
                    per_gate_terms: self.per_gate_terms.iter().map(|t| t * s).collect(),
                    domain_convention: DomainConvention::RawDataSpace,
                }
            }
        }
    }
}

/// `N(gamma/2, Z) <= (6R/gamma)^(d+1)`; the extra dimension is the label.
pub fn covering_number_upper(radius: f64, gamma: f64, data_dim: usize) -> Result<f64> {
    if !(radius > 0.0 && gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "covering radius and scale must be positive, got R = {radius}, gamma = {gamma}"
        )));
    }
    Ok((6.0 * radius / gamma).powi(data_dim as i32 + 1))
}

/// Scale `gamma` of the covering argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma {
    /// `n^(-1/(2d+2))`, which drives the bound to zero as `n` grows.
    Auto,
    Fixed(f64),
}

impl Gamma {
    pub fn resolve(self, n_samples: u64, data_dim: usize) -> f64 {
        match self {
            Gamma::Fixed(g) => g,
            Gamma::Auto => (n_samples as f64).powf(-1.0 / (2.0 * data_dim as f64 + 2.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenBoundInputs {
    /// Lipschitz bound of the model.
    pub lipschitz: f64,
    pub loss_lipschitz: f64,
    /// Sup of the loss over label pairs.
    pub loss_sup: f64,
    /// Radius of the smallest ball containing the sample space.
    pub radius: f64,
    pub data_dim: usize,
    pub n_samples: u64,
    pub delta: f64,
    pub gamma: Gamma,
}

impl GenBoundInputs {
    /// Squared-loss constants and the ball around `[-pi, pi]^d x {-1, 1}`.
    pub fn with_defaults(lipschitz: f64, data_dim: usize, n_samples: u64, delta: f64) -> Self {
        Self {
            lipschitz,
            loss_lipschitz: DEFAULT_LOSS_LIPSCHITZ,
            loss_sup: DEFAULT_LOSS_SUP,
            radius: default_radius(data_dim),
            data_dim,
            n_samples,
            delta,
            gamma: Gamma::Auto,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.lipschitz >= 0.0 && self.lipschitz.is_finite()) {
            return bad(format!("model Lipschitz bound must be >= 0, got {}", self.lipschitz));
        }
        if !(self.loss_lipschitz > 0.0 && self.loss_sup > 0.0 && self.radius > 0.0) {
            return bad("loss constants and radius must be positive".into());
        }
        if self.data_dim == 0 || self.n_samples == 0 {
            return bad("data dimension and sample count must be positive".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("confidence level must lie in (0, 1), got {}", self.delta));
        }
        if let Gamma::Fixed(g) = self.gamma {
            if g.is_nan() || g <= 0.0 {
                return bad(format!("gamma must be positive, got {g}"));
            }
        }
        Ok(())
    }
}

/// `sqrt(d pi^2 + 1)`.
pub fn default_radius(data_dim: usize) -> f64 {
    (data_dim as f64 * PREPROCESSING_SLOPE.powi(2) + 1.0).sqrt()
}

/// `gamma L_loss max{1, L} + M sqrt((2 N(gamma/2) ln 2 + 2 ln(1/delta)) / n)`,
/// holding with probability at least `1 - delta`.
pub fn generalization_bound(inp: &GenBoundInputs) -> Result<f64> {
    inp.validate()?;
    let gamma = inp.gamma.resolve(inp.n_samples, inp.data_dim);
    let covering = covering_number_upper(inp.radius, gamma, inp.data_dim)?;
    let robustness = gamma * inp.loss_lipschitz * inp.lipschitz.max(1.0);
    let statistical = inp.loss_sup
        * ((2.0 * covering * std::f64::consts::LN_2 + 2.0 * (1.0 / inp.delta).ln())
            / inp.n_samples as f64)
            .sqrt();
    Ok(robustness + statistical)
}
