// SPDX-License-Identifier: Apache-2.0

mod common;

use common::{dense, random_circuit, random_observable, random_word};
use lipsqml_core::model::{forward_angles, prepare_state};
use lipsqml_core::{Observable, Pauli, PauliWord, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

#[test]
fn random_circuits_match_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let n = 2 + case % 2;
        let n_ops = rng.gen_range(1..14);
        let circuit = random_circuit(&mut rng, n, 2, n_ops);
        let angles: Vec<f64> = (0..circuit.n_rotations()).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let got = prepare_state(&circuit, &angles).unwrap();
        let want = dense::state(&circuit, &angles);
        let err = got
            .amplitudes()
            .iter()
            .zip(&want)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "case {case}: amplitude error {err}");

        let obs = random_observable(&mut rng, n);
        let f = forward_angles(&circuit, &angles, &obs).unwrap();
        let oracle = dense::expectation(&circuit, &angles, &obs);
        assert!((f - oracle).abs() < 1e-9, "case {case}: {f} vs {oracle}");
    }
}

#[test]
fn paper_circuit_matches_dense_oracle() {
    let circuit = lipsqml_core::build_paper_circuit(3, 3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let angles: Vec<f64> = (0..circuit.n_rotations()).map(|_| rng.gen_range(-7.0..7.0)).collect();
        let obs = Observable::z_parity(3);
        let f = forward_angles(&circuit, &angles, &obs).unwrap();
        assert!((f - dense::expectation(&circuit, &angles, &obs)).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rotations_preserve_norm(seed in any::<u64>(), n in 1usize..5, angle in -10.0..10.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut psi = random_state(&mut rng, n);
        let c = rng.gen_range(-2.0..2.0);
        let w = random_word(&mut rng, n, c);
        psi.apply_pauli_rotation(&w, angle).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        if n > 1 {
            psi.apply_cnot(0, n - 1).unwrap();
            prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_generator_rotations_compose(seed in any::<u64>(), n in 1usize..5, a in -5.0..5.0f64, b in -5.0..5.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(&mut rng, n);
        let w = random_word(&mut rng, n, 1.0);
        let mut two = psi.clone();
        two.apply_pauli_rotation(&w, a).unwrap();
        two.apply_pauli_rotation(&w, b).unwrap();
        let mut one = psi;
        one.apply_pauli_rotation(&w, a + b).unwrap();
        for (x, y) in one.amplitudes().iter().zip(two.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn expectation_bounded_by_coefficient_mass(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(&mut rng, n);
        let obs = random_observable(&mut rng, n);
        let e = psi.expectation(&obs).unwrap();
        prop_assert!(e.abs() <= obs.coefficient_l1() + 1e-12);
    }

    #[test]
    fn expectation_is_linear_in_observable(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(&mut rng, n);
        let a = random_observable(&mut rng, n);
        let b = random_observable(&mut rng, n);
        let sum = psi.expectation(&a.sum(&b)).unwrap();
        prop_assert!((sum - psi.expectation(&a).unwrap() - psi.expectation(&b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_rotation_matches_matrix(angle in -7.0..7.0f64, which in 0usize..3) {
        let p = [Pauli::X, Pauli::Y, Pauli::Z][which];
        let mut psi = StateVector::from_amplitudes(vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ]).unwrap();
        psi.apply_pauli_rotation(&PauliWord::single(0, p, 0.5), angle).unwrap();
        let u = dense::expm(&(dense::pauli(p) * Complex64::new(0.0, -angle / 2.0)));
        let v = u * nalgebra::DVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        for (x, y) in psi.amplitudes().iter().zip(v.iter()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }
}
