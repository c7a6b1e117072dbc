// SPDX-License-Identifier: Apache-2.0

//! Lipschitz-regularized empirical risk minimization with full-batch ADAM.
//!
//! Objective: `(1/n) sum_k (y_k - f(x_k))^2 + lambda * R(params)` where `R`
//! is either the encoding penalty `sum_j ||w_j||^2 ||H_j||^2` (which bounds the
//! Lipschitz constant) or, for fixed encodings, the angle penalty
//! `sum_j phi_j^2`.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::{rescale_to_angle_domain, Dataset};
use crate::bounds::lipschitz_tight;
use crate::error::{Error, Result};
use crate::grad::{chain_rule, value_and_angle_gradients, Gradient};
use crate::model::{Circuit, Label, ModelParams};
use crate::qsim::Observable;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    #[default]
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularizer {
    /// `sum_j ||w_j||^2 ||H_j||^2` over rotations with trainable weights.
    #[default]
    EncodingNorm,
    /// `sum_j phi_j^2` over trainable offsets of a fixed-encoding circuit.
    AngleNorm,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub restarts: usize,
    pub seed: u64,
    pub loss: Loss,
    pub regularizer: Regularizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            learning_rate: 0.1,
            epochs: 200,
            restarts: 9,
            seed: 0,
            loss: Loss::Squared,
            regularizer: Regularizer::EncodingNorm,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be a finite non-negative number");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.epochs == 0 || self.restarts == 0 {
            return bad("epochs and restarts must be at least 1");
        }
        Ok(())
    }
}

/// `(y - yhat)^2`.
pub fn loss_squared(y: Label, prediction: f64) -> f64 {
    let r = f64::from(y) - prediction;
    r * r
}

/// `sum_j ||w_j||^2 scale_j^2` over rotations with trainable weights.
pub fn regularizer_encoding(circuit: &Circuit, params: &ModelParams) -> f64 {
    circuit
        .rotations()
        .zip(params.weight_rows())
        .filter(|(rot, _)| rot.mask.weights)
        .map(|(rot, w)| w.iter().map(|a| a * a).sum::<f64>() * rot.scale * rot.scale)
        .sum()
}

/// `sum_j phi_j^2` over the trainable offsets of a fixed-encoding circuit.
pub fn regularizer_angles(circuit: &Circuit, params: &ModelParams) -> Result<f64> {
    if circuit.has_trainable_encoding() {
        return Err(Error::TrainableEncoding);
    }
    Ok(circuit
        .rotations()
        .zip(params.offsets())
        .filter(|(rot, _)| rot.mask.offset)
        .map(|(_, t)| t * t)
        .sum())
}

/// Regularizer value and its gradient.
fn regularizer_with_gradient(
    circuit: &Circuit,
    params: &ModelParams,
    kind: Regularizer,
) -> Result<(f64, Gradient)> {
    let d = params.data_dim();
    let mut g = Gradient::zeros(params.n_rotations(), d);
    let value = match kind {
        Regularizer::None => 0.0,
        Regularizer::EncodingNorm => {
            for (j, rot) in circuit.rotations().enumerate() {
                if rot.mask.weights {
                    let s2 = rot.scale * rot.scale;
                    for (gw, w) in g.weights[j * d..(j + 1) * d].iter_mut().zip(params.weight_row(j)) {
                        *gw = 2.0 * s2 * w;
                    }
                }
            }
            regularizer_encoding(circuit, params)
        }
        Regularizer::AngleNorm => {
            let value = regularizer_angles(circuit, params)?;
            for (j, rot) in circuit.rotations().enumerate() {
                if rot.mask.offset {
                    g.offsets[j] = 2.0 * params.offsets()[j];
                }
            }
            value
        }
    };
    Ok((value, g))
}

/// Inputs already mapped into the circuit's angle domain.
struct PreparedData {
    inputs: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

impl PreparedData {
    fn new(dataset: &Dataset) -> Result<Self> {
        if dataset.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self {
            inputs: dataset.points.iter().map(|p| rescale_to_angle_domain(p)).collect(),
            labels: dataset.labels.clone(),
        })
    }
}

/// Regularized empirical risk on a dataset of raw inputs.
pub fn objective(
    circuit: &Circuit,
    params: &ModelParams,
    obs: &Observable,
    dataset: &Dataset,
    config: &TrainConfig,
) -> Result<f64> {
    let data = PreparedData::new(dataset)?;
    let mut risk = 0.0;
    for (x, &y) in data.inputs.iter().zip(&data.labels) {
        risk += loss_squared(y, crate::model::forward(circuit, params, x, obs)?);
    }
    let reg = match config.regularizer {
        Regularizer::None => 0.0,
        Regularizer::EncodingNorm => regularizer_encoding(circuit, params),
        Regularizer::AngleNorm => regularizer_angles(circuit, params)?,
    };
    Ok(risk / data.inputs.len() as f64 + config.lambda * reg)
}

/// Objective and its gradient with respect to the trainable parameters.
pub fn objective_and_gradient(
    circuit: &Circuit,
    params: &ModelParams,
    obs: &Observable,
    dataset: &Dataset,
    config: &TrainConfig,
) -> Result<(f64, Gradient)> {
    let data = PreparedData::new(dataset)?;
    prepared_objective_and_gradient(circuit, params, obs, &data, config)
}

fn prepared_objective_and_gradient(
    circuit: &Circuit,
    params: &ModelParams,
    obs: &Observable,
    data: &PreparedData,
    config: &TrainConfig,
) -> Result<(f64, Gradient)> {
    let n = data.inputs.len() as f64;
    let mut grad = Gradient::zeros(params.n_rotations(), params.data_dim());
    let mut risk = 0.0;
    for (x, &y) in data.inputs.iter().zip(&data.labels) {
        let angles = params.angles(circuit, x)?;
        let (f, angle_grads) = value_and_angle_gradients(circuit, &angles, obs)?;
        risk += loss_squared(y, f);
        // d/dtheta (y - f)^2 = 2 (f - y) df/dtheta
        let dl = 2.0 * (f - f64::from(y)) / n;
        grad.add_scaled(&chain_rule(circuit, &angle_grads, x), dl);
    }
    let (reg, reg_grad) = regularizer_with_gradient(circuit, params, config.regularizer)?;
    grad.add_scaled(&reg_grad, config.lambda);
    Ok((risk / n + config.lambda * reg, grad))
}

/// ADAM moment estimates for the flat parameter vector `[W, Omega]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub step: u32,
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            step: 0,
            first_moment: vec![0.0; len],
            second_moment: vec![0.0; len],
        }
    }

    pub fn for_params(params: &ModelParams) -> Self {
        Self::new(params.weights().len() + params.offsets().len())
    }

    /// One bias-corrected ADAM update on a flat slice. Entries with
    /// `trainable[i] == false` are left untouched, moments included.
    pub fn update(&mut self, values: &mut [f64], grads: &[f64], trainable: &[bool], lr: f64) -> Result<()> {
        let len = self.first_moment.len();
        for got in [values.len(), grads.len(), trainable.len()] {
            if got != len {
                return Err(Error::Dimension { expected: len, got });
            }
        }
        self.step += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.step as i32);
        let c2 = 1.0 - ADAM_BETA2.powi(self.step as i32);
        for i in 0..len {
            if !trainable[i] {
                continue;
            }
            let g = grads[i];
            let m = &mut self.first_moment[i];
            let v = &mut self.second_moment[i];
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            values[i] -= lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPSILON);
        }
        Ok(())
    }
}

/// Trainability of every flat parameter `[W, Omega]`.
pub fn trainable_flags(circuit: &Circuit) -> Vec<bool> {
    let d = circuit.data_dim();
    let mut flags: Vec<bool> = circuit
        .rotations()
        .flat_map(|r| std::iter::repeat(r.mask.weights).take(d))
        .collect();
    flags.extend(circuit.rotations().map(|r| r.mask.offset));
    flags
}

/// One ADAM step on `(W, Omega)`; masked entries are untouched.
pub fn adam_step(
    circuit: &Circuit,
    params: &mut ModelParams,
    gradient: &Gradient,
    state: &mut AdamState,
    learning_rate: f64,
) -> Result<()> {
    params.check_circuit(circuit)?;
    let n_w = params.weights().len();
    let mut flat: Vec<f64> = params.weights().iter().chain(params.offsets()).copied().collect();
    let grads: Vec<f64> = gradient.weights.iter().chain(&gradient.offsets).copied().collect();
    state.update(&mut flat, &grads, &trainable_flags(circuit), learning_rate)?;
    params.weights_mut().copy_from_slice(&flat[..n_w]);
    params.offsets_mut().copy_from_slice(&flat[n_w..]);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainResult {
    #[serde(skip)]
    pub best_params: ModelParams,
    pub best_cost: f64,
    pub best_restart: usize,
    pub best_epoch: usize,
    /// `history[r][e]`: cost of the parameters entering epoch `e` of restart `r`.
    pub history: Vec<Vec<f64>>,
    /// Tight Lipschitz bound of `best_params` in the scaled input space.
    pub lipschitz_bound: f64,
}

impl TrainResult {
    /// Writes `restart,epoch,cost` rows.
    pub fn write_history_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io {
            path: "history".into(),
            message: e.to_string(),
        };
        w.write_record(["restart", "epoch", "cost"]).map_err(io)?;
        for (r, trace) in self.history.iter().enumerate() {
            for (e, cost) in trace.iter().enumerate() {
                w.write_record([r.to_string(), e.to_string(), format!("{cost:?}")])
                    .map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::Io {
            path: "history".into(),
            message: e.to_string(),
        })
    }
}

struct RestartOutcome {
    best_params: ModelParams,
    best_cost: f64,
    best_epoch: usize,
    trace: Vec<f64>,
}

/// RNG for restart `restart` of a run seeded with `seed`.
pub fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn run_restart(
    circuit: &Circuit,
    obs: &Observable,
    data: &PreparedData,
    config: &TrainConfig,
    restart: usize,
) -> Result<RestartOutcome> {
    let mut params = ModelParams::random(circuit, &mut restart_rng(config.seed, restart));
    let mut adam = AdamState::for_params(&params);
    let mut trace = Vec::with_capacity(config.epochs);
    let mut best = (f64::INFINITY, 0, params.clone());
    for epoch in 0..config.epochs {
        let (cost, grad) = prepared_objective_and_gradient(circuit, &params, obs, data, config)?;
        trace.push(cost);
        if cost < best.0 {
            best = (cost, epoch, params.clone());
        }
        adam_step(circuit, &mut params, &grad, &mut adam, config.learning_rate)?;
    }
    Ok(RestartOutcome {
        best_params: best.2,
        best_cost: best.0,
        best_epoch: best.1,
        trace,
    })
}

/// Multi-restart full-batch training. Restarts run in parallel; the result
/// does not depend on scheduling.
pub fn train(circuit: &Circuit, obs: &Observable, dataset: &Dataset, config: &TrainConfig) -> Result<TrainResult> {
    config.validate()?;
    obs.check_qubits(circuit.n_qubits())?;
    if config.regularizer == Regularizer::AngleNorm && circuit.has_trainable_encoding() {
        return Err(Error::TrainableEncoding);
    }
    let data = PreparedData::new(dataset)?;
    let outcomes = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(circuit, obs, &data, config, r))
        .collect::<Result<Vec<_>>>()?;

    // Strict `<` keeps the lowest restart index on ties.
    let mut best_restart = 0;
    for (r, o) in outcomes.iter().enumerate() {
        if o.best_cost < outcomes[best_restart].best_cost {
            best_restart = r;
        }
    }
    let history = outcomes.iter().map(|o| o.trace.clone()).collect();
    let best = outcomes.into_iter().nth(best_restart).expect("restarts >= 1");
    let lipschitz_bound = lipschitz_tight(circuit, &best.best_params, obs)?;
    Ok(TrainResult {
        best_params: best.best_params,
        best_cost: best.best_cost,
        best_restart,
        best_epoch: best.best_epoch,
        history,
        lipschitz_bound,
    })
}
