// SPDX-License-Identifier: Apache-2.0

use lipsqml_core::bench::{derive_seed, generate_circle_dataset};
use lipsqml_core::model::fixed_forward;
use lipsqml_core::train::{regularizer_encoding, AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
use lipsqml_core::{
    build_fixed_circuit, build_paper_circuit, forward, train, FixedEncodingSpec, ModelParams, Observable,
    Regularizer, TrainConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn adam_matches_scalar_reference_on_quadratic() {
    let mut p = [0.0];
    let mut state = AdamState::new(1);
    // Independent scalar implementation.
    let (mut q, mut m, mut v) = (0.0_f64, 0.0_f64, 0.0_f64);
    for t in 1..=100 {
        let g = 2.0 * (p[0] - 3.0);
        state.update(&mut p, &[g], &[true], 0.1).unwrap();

        let g = 2.0 * (q - 3.0);
        m = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * g;
        v = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * g * g;
        let mh = m / (1.0 - ADAM_BETA1.powi(t));
        let vh = v / (1.0 - ADAM_BETA2.powi(t));
        q -= 0.1 * mh / (vh.sqrt() + ADAM_EPSILON);
        assert!((p[0] - q).abs() < 1e-12);
    }
    assert!((p[0] - 3.0).abs() < 0.05, "ended at {}", p[0]);
}

fn small_config(lambda: f64, seed: u64) -> TrainConfig {
    TrainConfig {
        lambda,
        epochs: 25,
        restarts: 3,
        seed,
        ..TrainConfig::default()
    }
}

#[test]
fn training_is_deterministic() {
    let circuit = build_paper_circuit(2, 2, 2).unwrap();
    let obs = Observable::z_parity(2);
    let data = generate_circle_dataset(30, 5).unwrap();
    let a = train(&circuit, &obs, &data, &small_config(0.1, 42)).unwrap();
    let b = train(&circuit, &obs, &data, &small_config(0.1, 42)).unwrap();
    assert_eq!(a.best_cost.to_bits(), b.best_cost.to_bits());
    assert_eq!(a.best_params, b.best_params);
    assert_eq!(a.history, b.history);
    let c = train(&circuit, &obs, &data, &small_config(0.1, 43)).unwrap();
    assert_ne!(a.history, c.history);
}

#[test]
fn best_cost_is_minimum_of_history() {
    let circuit = build_paper_circuit(2, 2, 2).unwrap();
    let obs = Observable::z_parity(2);
    let data = generate_circle_dataset(30, 5).unwrap();
    let r = train(&circuit, &obs, &data, &small_config(0.05, 1)).unwrap();
    assert_eq!(r.history.len(), 3);
    assert!(r.history.iter().all(|h| h.len() == 25));
    let min = r.history.iter().flatten().fold(f64::INFINITY, |a, &b| a.min(b));
    assert_eq!(r.best_cost, min);
    assert_eq!(r.history[r.best_restart][r.best_epoch], r.best_cost);
}

#[test]
fn heavy_regularization_shrinks_encoding_weights() {
    let circuit = build_paper_circuit(2, 1, 2).unwrap();
    let obs = Observable::z_parity(2);
    let data = generate_circle_dataset(20, 2).unwrap();
    let config = TrainConfig {
        lambda: 1e6,
        epochs: 200,
        restarts: 1,
        ..TrainConfig::default()
    };
    let r = train(&circuit, &obs, &data, &config).unwrap();
    let reg = regularizer_encoding(&circuit, &r.best_params);
    assert!(reg < 1e-3, "sum of squared weights {reg}");
}

#[test]
fn fixed_encoding_bound_is_independent_of_training() {
    let circuit = build_fixed_circuit(&FixedEncodingSpec::paper(2, 2)).unwrap();
    let obs = Observable::z_parity(2);
    let data = generate_circle_dataset(20, 3).unwrap();
    let bounds: Vec<f64> = [0.0, 0.2, 0.5]
        .iter()
        .map(|&lambda| {
            let config = TrainConfig {
                regularizer: Regularizer::AngleNorm,
                ..small_config(lambda, 7)
            };
            train(&circuit, &obs, &data, &config).unwrap().lipschitz_bound
        })
        .collect();
    assert!(bounds.iter().all(|&b| b == bounds[0]));
    // Two layers, two qubits, two unit-weight data gates each, ||H|| = 1/2.
    assert_eq!(bounds[0], 8.0);
}

#[test]
fn derived_seeds_differ_per_stream() {
    let seeds: Vec<u64> = (0..4).map(|s| derive_seed(0, s)).collect();
    for i in 0..4 {
        for j in i + 1..4 {
            assert_ne!(seeds[i], seeds[j]);
        }
    }
    assert_eq!(derive_seed(9, 2), derive_seed(9, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_circuit_matches_direct_evaluation(seed in any::<u64>(), n in 2usize..4, layers in 1usize..4) {
        let spec = FixedEncodingSpec::paper(n, layers);
        let circuit = build_fixed_circuit(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi: Vec<f64> = (0..spec.n_angles()).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let x = [rng.gen_range(-3.2..3.2), rng.gen_range(-3.2..3.2)];
        let mut params = ModelParams::defaults(&circuit);
        let mut it = phi.iter();
        for (rot, theta) in circuit.rotations().zip(params.offsets_mut()) {
            if rot.mask.offset {
                *theta = *it.next().unwrap();
            }
        }
        let obs = Observable::z_parity(n);
        let a = forward(&circuit, &params, &x, &obs).unwrap();
        let b = fixed_forward(&spec, &phi, &x, &obs).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }
}
