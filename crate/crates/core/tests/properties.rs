//! Property tests for the structural invariants: linear-algebra
//! consistency, objective identities, unitarity of the transform, and
//! stochasticity of the noisy output map.

use num_complex::Complex64;
use proptest::prelude::*;

use dqi_core::fp::{hamming_weight, FpMatrix, FpVector, PrimeModulus};
use dqi_core::instance::{make_random, MaxLinSatInstance};
use dqi_core::noise::{noisy_output_distribution, NoiseModel};
use dqi_core::state::{fourier_state, AmplitudeVector, FourierDirection};

fn small_prime() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]
}

prop_compose! {
    fn matrix_and_vectors()(p in small_prime(), rows in 1usize..6, cols in 1usize..5, seed in any::<u64>())
        (p in Just(p), rows in Just(rows), cols in Just(cols),
         entries in proptest::collection::vec(0u64..64, rows * cols),
         x in proptest::collection::vec(0u64..64, cols),
         y in proptest::collection::vec(0u64..64, rows),
         seed in Just(seed))
        -> (FpMatrix, FpVector, FpVector, u64) {
        let modulus = PrimeModulus::new(p).unwrap();
        let entries: Vec<u32> = entries.into_iter().map(|e| modulus.reduce(e)).collect();
        let matrix = FpMatrix::new(modulus, rows, cols, entries).unwrap();
        let x = FpVector::new(modulus, x.into_iter().map(|e| modulus.reduce(e)).collect()).unwrap();
        let y = FpVector::new(modulus, y.into_iter().map(|e| modulus.reduce(e)).collect()).unwrap();
        (matrix, x, y, seed)
    }
}

proptest! {
    #[test]
    fn transpose_matches_explicit_transpose((matrix, _x, y, _seed) in matrix_and_vectors()) {
        let p = matrix.modulus();
        let mut transposed = Vec::with_capacity(matrix.rows() * matrix.cols());
        for j in 0..matrix.cols() {
            for i in 0..matrix.rows() {
                transposed.push(matrix.row(i)[j]);
            }
        }
        let explicit = FpMatrix::new(p, matrix.cols(), matrix.rows(), transposed).unwrap();
        prop_assert_eq!(
            matrix.transpose_mat_vec(&y).unwrap(),
            explicit.mat_vec(&y).unwrap()
        );
    }

    #[test]
    fn weight_zero_iff_zero_vector((_m, x, _y, _seed) in matrix_and_vectors()) {
        let is_zero = x.entries().iter().all(|&e| e == 0);
        prop_assert_eq!(hamming_weight(&x) == 0, is_zero);
    }

    #[test]
    fn score_and_objective_identity(p in small_prime(), m in 1usize..7, n in 1usize..4, seed in any::<u64>()) {
        let r = 1 + (seed as usize) % (p as usize - 1).max(1);
        let inst = make_random(p, m, n, r, seed).unwrap();
        let modulus = inst.modulus();
        let digits: Vec<u32> = (0..n).map(|j| ((seed >> (j * 3)) as u32) % modulus.get()).collect();
        let x = FpVector::new(modulus, digits).unwrap();
        let s = inst.score(&x).unwrap();
        prop_assert!(s <= m);
        prop_assert_eq!(inst.objective(&x).unwrap(), 2 * s as i64 - m as i64);
    }

    #[test]
    fn fourier_is_unitary(p in prop_oneof![Just(2u64), Just(3), Just(5)], n in 1usize..4, seed in any::<u64>()) {
        let modulus = PrimeModulus::new(p).unwrap();
        let len = (p as usize).pow(n as u32);
        let mut lcg = seed | 1;
        let mut next = || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((lcg >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let amps: Vec<Complex64> = (0..len).map(|_| Complex64::new(next(), next())).collect();
        let state = AmplitudeVector::new(modulus, n, amps).unwrap();
        let forward = fourier_state(&state, FourierDirection::Forward);
        prop_assert!((forward.norm_sq() - state.norm_sq()).abs() <= 1e-10 * state.norm_sq().max(1.0));
        let back = fourier_state(&forward, FourierDirection::Inverse);
        for (a, b) in state.amps().iter().zip(back.amps()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn noisy_distribution_is_stochastic(p in prop_oneof![Just(2u64), Just(3)], n in 1usize..4, eps_milli in 0u32..=1000, seed in any::<u64>()) {
        let modulus = PrimeModulus::new(p).unwrap();
        let len = (p as usize).pow(n as u32);
        let mut lcg = seed | 1;
        let mut next = || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((lcg >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let amps: Vec<Complex64> = (0..len).map(|_| Complex64::new(next(), next())).collect();
        let state = AmplitudeVector::new(modulus, n, amps).unwrap();
        prop_assume!(state.norm_sq() > 1e-3);
        let state = state.normalized().unwrap();
        let noise = NoiseModel::new(eps_milli as f64 / 1000.0).unwrap();
        let q = noisy_output_distribution(&state, noise).unwrap();
        let total: f64 = q.iter().sum();
        prop_assert!(q.iter().all(|&v| v >= -1e-15));
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn instance_text_round_trip(p in small_prime(), m in 1usize..6, n in 1usize..4, seed in any::<u64>()) {
        let r = 1 + (seed as usize) % (p as usize - 1).max(1);
        let inst = make_random(p, m, n, r, seed).unwrap();
        let text = inst.to_text();
        let parsed = MaxLinSatInstance::from_text(&text).unwrap();
        prop_assert_eq!(parsed.to_text(), text);
    }
}
