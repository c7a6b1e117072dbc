// SPDX-License-Identifier: Apache-2.0

//! Circle classification data, accuracy metrics, noise-robustness and
//! regularization sweeps.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::model::{forward, label_of, Circuit, Label, ModelParams};
use crate::qsim::Observable;
use crate::train::{train, TrainConfig, TrainResult};

/// Radius `sqrt(2/pi)` splits `[-1, 1]^2` into two regions of equal area.
pub fn circle_radius() -> f64 {
    (2.0 / PI).sqrt()
}

/// `+1` strictly inside the circle, `-1` on or outside it.
pub fn circle_label(point: &[f64]) -> Label {
    let r2: f64 = point.iter().map(|v| v * v).sum();
    if r2 < 2.0 / PI {
        1
    } else {
        -1
    }
}

/// Labeled raw inputs in `[-1, 1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub seed: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positive_fraction(&self) -> f64 {
        self.labels.iter().filter(|&&l| l == 1).count() as f64 / self.len() as f64
    }

    /// `x1,x2,...,label` with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io {
            path: "dataset".into(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_writer(out);
        let d = self.points.first().map_or(2, Vec::len);
        let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        header.push("label".into());
        w.write_record(&header).map_err(io)?;
        for (p, l) in self.points.iter().zip(&self.labels) {
            let mut row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
            row.push(l.to_string());
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "dataset".into(),
            message: e.to_string(),
        })
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let bad = |m: String| Error::InvalidArgument(format!("dataset csv: {m}"));
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.iter().next_back() != Some("label") || header.len() < 2 {
            return Err(bad("expected columns x1,...,xd,label".into()));
        }
        let d = header.len() - 1;
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let p = (0..d)
                .map(|k| rec[k].trim().parse::<f64>().map_err(|e| bad(format!("row {i}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let label: Label = rec[d].trim().parse().map_err(|e| bad(format!("row {i}: {e}")))?;
            if label != 1 && label != -1 {
                return Err(bad(format!("row {i}: label {label} is not +1/-1")));
            }
            points.push(p);
            labels.push(label);
        }
        Ok(Self {
            points,
            labels,
            seed: 0,
        })
    }
}

/// Independent seed for sub-stream `stream` of a master seed, so train,
/// test and noise data never share a random stream.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    use rand::RngCore;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

/// `n` points i.i.d. uniform on `[-1, 1]^2`, labeled by the circle rule.
pub fn generate_circle_dataset(n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("dataset size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)])
        .collect();
    let labels = points.iter().map(|p| circle_label(p)).collect();
    Ok(Dataset { points, labels, seed })
}

/// Preprocessing `[-1, 1]^d -> [-pi, pi]^d`. Values outside the cube are
/// scaled the same way.
pub fn rescale_to_angle_domain(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v * PI).collect()
}

/// Model output on a raw input (preprocessing included).
pub fn model_output(circuit: &Circuit, params: &ModelParams, obs: &Observable, raw: &[f64]) -> Result<f64> {
    forward(circuit, params, &rescale_to_angle_domain(raw), obs)
}

/// Fraction of points whose predicted label matches.
pub fn accuracy(circuit: &Circuit, params: &ModelParams, obs: &Observable, dataset: &Dataset) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let correct = dataset
        .points
        .par_iter()
        .zip(&dataset.labels)
        .map(|(p, &y)| Ok(usize::from(label_of(model_output(circuit, params, obs, p)?) == y)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(correct as f64 / dataset.len() as f64)
}

/// Noise directions uniform on `[-1, 1]^d`, `m` per test point. The actual
/// perturbation at level `eps` is `eps * draw`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBatch {
    pub unit_draws: Vec<Vec<Vec<f64>>>,
}

impl NoiseBatch {
    pub fn generate(n_points: usize, samples_per_point: usize, data_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let unit_draws = (0..n_points)
            .map(|_| {
                (0..samples_per_point)
                    .map(|_| (0..data_dim).map(|_| rng.gen_range(-1.0..=1.0)).collect())
                    .collect()
            })
            .collect();
        Self { unit_draws }
    }

    pub fn samples_per_point(&self) -> usize {
        self.unit_draws.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorstCaseMode {
    /// A point counts only if its clean copy and all noisy copies are correct.
    #[default]
    PerPoint,
    /// Minimum dataset accuracy over the clean set and each noise instance.
    PerDataset,
}

/// Per-point outcome of a perturbation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    pub clean_output: f64,
    pub clean_correct: bool,
    /// Whether noisy copy `k` is classified correctly.
    pub noisy_correct: Vec<bool>,
    /// Whether any noisy copy changed the predicted label.
    pub flipped: bool,
}

/// Evaluates every test point and its `eps`-scaled noisy copies.
pub fn perturbation_outcomes(
    circuit: &Circuit,
    params: &ModelParams,
    obs: &Observable,
    dataset: &Dataset,
    eps: f64,
    noise: &NoiseBatch,
) -> Result<Vec<PointOutcome>> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidArgument(format!("noise level must be >= 0, got {eps}")));
    }
    if noise.unit_draws.len() != dataset.len() || noise.samples_per_point() == 0 {
        return Err(Error::InvalidArgument(format!(
            "noise batch covers {} points with {} samples, dataset has {}",
            noise.unit_draws.len(),
            noise.samples_per_point(),
            dataset.len()
        )));
    }
    dataset
        .points
        .par_iter()
        .zip(&dataset.labels)
        .zip(&noise.unit_draws)
        .map(|((p, &y), draws)| {
            let clean_output = model_output(circuit, params, obs, p)?;
            let clean_label = label_of(clean_output);
            let mut noisy_correct = Vec::with_capacity(draws.len());
            let mut flipped = false;
            for draw in draws {
                let shifted: Vec<f64> = p.iter().zip(draw).map(|(a, u)| a + eps * u).collect();
                let l = label_of(model_output(circuit, params, obs, &shifted)?);
                flipped |= l != clean_label;
                noisy_correct.push(l == y);
            }
            Ok(PointOutcome {
                clean_output,
                clean_correct: clean_label == y,
                noisy_correct,
                flipped,
            })
        })
        .collect()
}

/// Accuracy under sampled perturbations of size `eps`.
pub fn worst_case_from_outcomes(outcomes: &[PointOutcome], mode: WorstCaseMode) -> f64 {
    let n = outcomes.len() as f64;
    match mode {
        WorstCaseMode::PerPoint => {
            outcomes
                .iter()
                .filter(|o| o.clean_correct && o.noisy_correct.iter().all(|&c| c))
                .count() as f64
                / n
        }
        WorstCaseMode::PerDataset => {
            let m = outcomes.first().map_or(0, |o| o.noisy_correct.len());
            let clean = outcomes.iter().filter(|o| o.clean_correct).count();
            let worst = (0..m)
                .map(|k| outcomes.iter().filter(|o| o.noisy_correct[k]).count())
                .fold(clean, usize::min);
            worst as f64 / n
        }
    }
}

/// Worst-case accuracy with `m` noise samples per point drawn from `seed`.
#[allow(clippy::too_many_arguments)]
pub fn worst_case_accuracy(
    circuit: &Circuit,
    params: &ModelParams,
    obs: &Observable,
    dataset: &Dataset,
    eps: f64,
    m: usize,
    seed: u64,
    mode: WorstCaseMode,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one noise sample per point".into()));
    }
    let d = dataset.points.first().map_or(0, Vec::len);
    let noise = NoiseBatch::generate(dataset.len(), m, d, seed);
    let outcomes = perturbation_outcomes(circuit, params, obs, dataset, eps, &noise)?;
    Ok(worst_case_from_outcomes(&outcomes, mode))
}

/// Points whose clean margin `|f(x)|` exceeds `lipschitz_raw * eps * sqrt(d)`
/// yet flipped under some perturbation. Must be empty for a valid bound.
pub fn certificate_violations(outcomes: &[PointOutcome], lipschitz_raw: f64, eps: f64, data_dim: usize) -> Vec<usize> {
    let radius = lipschitz_raw * eps * (data_dim as f64).sqrt();
    outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.clean_output.abs() > radius && o.flipped)
        .map(|(i, _)| i)
        .collect()
}

/// A trained model entering a sweep.
#[derive(Debug, Clone)]
pub struct SweepModel {
    pub id: String,
    pub lambda: f64,
    pub circuit: Circuit,
    pub params: ModelParams,
    pub obs: Observable,
    pub train_accuracy: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Lambda,
    EpsBar,
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub model_id: String,
    pub lambda: f64,
    pub eps_bar: Option<f64>,
    pub train_acc: f64,
    pub test_acc: f64,
    pub worst_case_acc: Option<f64>,
    pub lipschitz_tight: f64,
    pub lipschitz_simple: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub records: Vec<SweepRecord>,
}

pub const SWEEP_CSV_COLUMNS: [&str; 9] = [
    "model_id",
    "lambda",
    "eps_bar",
    "train_acc",
    "test_acc",
    "worst_case_acc",
    "lipschitz_tight",
    "lipschitz_simple",
    "seed",
];

impl SweepResult {
    /// Rows in [`SWEEP_CSV_COLUMNS`] order; absent values are empty cells.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io {
            path: "sweep".into(),
            message: e.to_string(),
        };
        let opt = |v: Option<f64>| v.map(|v| format!("{v:?}")).unwrap_or_default();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SWEEP_CSV_COLUMNS).map_err(io)?;
        for r in &self.records {
            w.write_record([
                r.model_id.clone(),
                format!("{:?}", r.lambda),
                opt(r.eps_bar),
                format!("{:?}", r.train_acc),
                format!("{:?}", r.test_acc),
                opt(r.worst_case_acc),
                format!("{:?}", r.lipschitz_tight),
                format!("{:?}", r.lipschitz_simple),
                r.seed.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "sweep".into(),
            message: e.to_string(),
        })
    }

    /// Whitespace-separated columns with a `#` header, for gnuplot.
    pub fn write_gnuplot<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Io {
            path: "sweep".into(),
            message: e.to_string(),
        };
        writeln!(out, "# {}", SWEEP_CSV_COLUMNS.join(" ")).map_err(io)?;
        let opt = |v: Option<f64>| v.map_or("NaN".to_string(), |v| format!("{v:?}"));
        for r in &self.records {
            writeln!(
                out,
                "{} {:?} {} {:?} {:?} {} {:?} {:?} {}",
                r.model_id,
                r.lambda,
                opt(r.eps_bar),
                r.train_acc,
                r.test_acc,
                opt(r.worst_case_acc),
                r.lipschitz_tight,
                r.lipschitz_simple,
                r.seed
            )
            .map_err(io)?;
        }
        Ok(())
    }

    /// Records of one model, in sweep order.
    pub fn model_records<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a SweepRecord> + 'a {
        self.records.iter().filter(move |r| r.model_id == id)
    }
}

/// Worst-case accuracy of every model at every noise level. Rows are ordered
/// by noise level, then by model order. Fails if any certified point flips.
pub fn robustness_sweep(
    models: &[SweepModel],
    test: &Dataset,
    eps_grid: &[f64],
    m: usize,
    seed: u64,
    mode: WorstCaseMode,
) -> Result<SweepResult> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one noise sample per point".into()));
    }
    let d = test.points.first().map_or(0, Vec::len);
    let noise = NoiseBatch::generate(test.len(), m, d, seed);
    let bounds = models
        .iter()
        .map(|mdl| BoundReport::compute(&mdl.circuit, &mdl.params, &mdl.obs))
        .collect::<Result<Vec<_>>>()?;
    let clean = models
        .iter()
        .map(|mdl| accuracy(&mdl.circuit, &mdl.params, &mdl.obs, test))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(eps_grid.len() * models.len());
    for &eps in eps_grid {
        for ((mdl, bound), &test_acc) in models.iter().zip(&bounds).zip(&clean) {
            let outcomes = perturbation_outcomes(&mdl.circuit, &mdl.params, &mdl.obs, test, eps, &noise)?;
            let raw = bound.to_raw_space().lipschitz_tight;
            let violations = certificate_violations(&outcomes, raw, eps, d);
            if !violations.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "Lipschitz certificate violated for model {} at eps {eps}: points {violations:?}",
                    mdl.id
                )));
            }
            records.push(SweepRecord {
                model_id: mdl.id.clone(),
                lambda: mdl.lambda,
                eps_bar: Some(eps),
                train_acc: mdl.train_accuracy,
                test_acc,
                worst_case_acc: Some(worst_case_from_outcomes(&outcomes, mode)),
                lipschitz_tight: bound.lipschitz_tight,
                lipschitz_simple: bound.lipschitz_simple,
                seed,
            });
        }
    }
    Ok(SweepResult {
        axis: SweepAxis::EpsBar,
        records,
    })
}

/// Output of a regularization sweep: one record and one trained model per
/// grid value.
#[derive(Debug, Clone)]
pub struct GeneralizationSweep {
    pub result: SweepResult,
    pub trained: Vec<TrainResult>,
}

/// Trains one model per `lambda` and scores it on the test set.
#[allow(clippy::too_many_arguments)]
pub fn generalization_sweep(
    model_id: &str,
    circuit: &Circuit,
    obs: &Observable,
    lambda_grid: &[f64],
    base: &TrainConfig,
    train_set: &Dataset,
    test_set: &Dataset,
    progress: &(dyn Fn(f64) + Sync),
) -> Result<GeneralizationSweep> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidArgument("lambda grid is empty".into()));
    }
    let rows = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let config = TrainConfig {
                lambda,
                ..base.clone()
            };
            let trained = train(circuit, obs, train_set, &config)?;
            let p = &trained.best_params;
            let bound = BoundReport::compute(circuit, p, obs)?;
            let record = SweepRecord {
                model_id: model_id.to_string(),
                lambda,
                eps_bar: None,
                train_acc: accuracy(circuit, p, obs, train_set)?,
                test_acc: accuracy(circuit, p, obs, test_set)?,
                worst_case_acc: None,
                lipschitz_tight: bound.lipschitz_tight,
                lipschitz_simple: bound.lipschitz_simple,
                seed: base.seed,
            };
            progress(lambda);
            Ok((record, trained))
        })
        .collect::<Result<Vec<_>>>()?;
    let (records, trained) = rows.into_iter().unzip();
    Ok(GeneralizationSweep {
        result: SweepResult {
            axis: SweepAxis::Lambda,
            records,
        },
        trained,
    })
}
