//! Cross-module identities: the closed-form predictor against the exact
//! simulator, and the decoder's quadratic-form machinery against exhaustive
//! averages over accepted-value sets.

use num_complex::Complex64;

use dqi_core::decoder::{
    build_abar_complete, build_abar_decoded, build_d_correction, build_decoder,
    postselected_norm_check, DecoderPolicy,
};
use dqi_core::fp::{check_distance_condition, FpMatrix, PrimeModulus};
use dqi_core::instance::{make_opi, make_random, MaxLinSatInstance};
use dqi_core::noise::{expected_score_exact, tau_summary, NoiseModel};
use dqi_core::predictor::{
    build_a, coupling_d, expected_score_closed_form, principal_coefficients,
};
use dqi_core::state::{build_dqi_state, DqiCoefficients};

/// All r-subset choices for every constraint of a small instance, visited
/// through a callback. r = 1 keeps the combinatorics tame.
fn for_each_singleton_rhs(inst: &MaxLinSatInstance, f: &mut impl FnMut(&MaxLinSatInstance)) {
    let p = inst.modulus().get();
    let m = inst.num_constraints();
    let total = (p as u64).pow(m as u32);
    for code in 0..total {
        let mut rest = code;
        let sets: Vec<Vec<u32>> = (0..m)
            .map(|_| {
                let v = (rest % p as u64) as u32;
                rest /= p as u64;
                vec![v]
            })
            .collect();
        let trial = inst.with_sets(sets).unwrap();
        f(&trial);
    }
}

/// Same, over all size-r subsets per constraint.
fn for_each_subset_rhs(inst: &MaxLinSatInstance, r: usize, f: &mut impl FnMut(&MaxLinSatInstance)) {
    let p = inst.modulus().get();
    let m = inst.num_constraints();
    let mut subsets: Vec<Vec<u32>> = Vec::new();
    let mut pick: Vec<u32> = (0..r as u32).collect();
    loop {
        subsets.push(pick.clone());
        let mut idx = r;
        for j in (0..r).rev() {
            if pick[j] != (j as u32) + p - r as u32 {
                idx = j;
                break;
            }
        }
        if idx == r {
            break;
        }
        pick[idx] += 1;
        for j in idx + 1..r {
            pick[j] = pick[j - 1] + 1;
        }
    }
    let total = (subsets.len() as u64).pow(m as u32);
    for code in 0..total {
        let mut rest = code;
        let sets: Vec<Vec<u32>> = (0..m)
            .map(|_| {
                let choice = (rest % subsets.len() as u64) as usize;
                rest /= subsets.len() as u64;
                subsets[choice].clone()
            })
            .collect();
        let trial = inst.with_sets(sets).unwrap();
        f(&trial);
    }
}

fn matrix_close(a: &[Vec<Complex64>], b: &[Vec<Complex64>], tol: f64) -> Result<(), String> {
    for (k1, (ra, rb)) in a.iter().zip(b).enumerate() {
        for (k2, (va, vb)) in ra.iter().zip(rb).enumerate() {
            if (va - vb).norm() > tol {
                return Err(format!("entry ({k1},{k2}): {va} vs {vb}"));
            }
        }
    }
    Ok(())
}

#[test]
fn closed_form_matches_simulator_across_primes() {
    // Rejection-sample random instances until the distance condition holds,
    // then compare closed form and simulator on a noise grid. The dimension
    // combos leave room for a dual distance of 4 (l = 1 needs d_perp >= 4,
    // which the Singleton bound caps at n + 1).
    let mut checked = 0;
    for (p, m, n, r) in [(2u64, 10usize, 6usize, 1usize), (3, 6, 5, 2), (5, 6, 5, 2)] {
        let mut found = false;
        for seed in 1..300u64 {
            let inst = make_random(p, m, n, r, seed * 131 + p).unwrap();
            if !check_distance_condition(inst.matrix(), 1).holds() {
                continue;
            }
            let d = coupling_d(p, r);
            let (_, coeffs) = principal_coefficients(m, 1, d).unwrap();
            let state = build_dqi_state(&inst, &coeffs).unwrap();
            for eps in [0.0, 0.1, 0.3, 0.7] {
                let noise = NoiseModel::new(eps).unwrap();
                let exact = expected_score_exact(&inst, &state, noise).unwrap();
                let predicted = expected_score_closed_form(&inst, &coeffs, noise).unwrap();
                assert!(
                    (exact - predicted).abs() <= 1e-9,
                    "p={p} seed={seed} eps={eps}: {exact} vs {predicted}"
                );
            }
            checked += 1;
            found = true;
            break;
        }
        assert!(found, "no admissible instance found for p = {p}");
    }
    assert_eq!(checked, 3);
}

#[test]
fn complete_set_average_matches_closed_form() {
    // Averaging the complete-set quadratic-form matrix over all singleton
    // accepted sets reproduces (m r / p) I + tau_1 sqrt(r(p-r))/p A.
    let p = 3u64;
    let (m, n, l) = (5usize, 2usize, 1usize);
    let base = make_random(p, m, n, 1, 7).unwrap();
    let noise = NoiseModel::new(0.3).unwrap();
    let size = l + 1;
    let mut mean = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    let mut count = 0usize;
    for_each_singleton_rhs(&base, &mut |trial| {
        let abar = build_abar_complete(trial, noise, l).unwrap();
        for k1 in 0..size {
            for k2 in 0..size {
                mean[k1][k2] += abar[k1][k2];
            }
        }
        count += 1;
    });
    for row in &mut mean {
        for v in row.iter_mut() {
            *v /= count as f64;
        }
    }
    let tau1 = tau_summary(base.matrix(), noise).tau1();
    let spec = build_a(m, l, coupling_d(p, 1)).unwrap();
    let pf = p as f64;
    let scale = tau1 * (1.0 * (pf - 1.0)).sqrt() / pf;
    let mut expected = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for (k1, row) in expected.iter_mut().enumerate() {
        for (k2, v) in row.iter_mut().enumerate() {
            let a_entry = if k1 == k2 {
                spec.diagonal()[k1]
            } else if k1 + 1 == k2 {
                spec.off_diagonal()[k1]
            } else if k2 + 1 == k1 {
                spec.off_diagonal()[k2]
            } else {
                0.0
            };
            let diag = if k1 == k2 { m as f64 / pf } else { 0.0 };
            *v = Complex64::new(diag + scale * a_entry, 0.0);
        }
    }
    matrix_close(&mean, &expected, 1e-9).unwrap();
}

#[test]
fn complete_set_average_matches_closed_form_at_r_two() {
    // Same identity with two accepted values per constraint: the averaging
    // now runs over all C(5,2)^m subset combinations and exercises the
    // nonzero diagonal slope d = (p-2r)/sqrt(r(p-r)).
    let p = 5u64;
    let (m, n, l, r) = (4usize, 2usize, 1usize, 2usize);
    let base = make_random(p, m, n, r, 3).unwrap();
    let noise = NoiseModel::new(0.35).unwrap();
    let size = l + 1;
    let mut mean = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    let mut count = 0usize;
    for_each_subset_rhs(&base, r, &mut |trial| {
        let abar = build_abar_complete(trial, noise, l).unwrap();
        for k1 in 0..size {
            for k2 in 0..size {
                mean[k1][k2] += abar[k1][k2];
            }
        }
        count += 1;
    });
    assert_eq!(count, 10usize.pow(4));
    let tau1 = tau_summary(base.matrix(), noise).tau1();
    let spec = build_a(m, l, coupling_d(p, r)).unwrap();
    let pf = p as f64;
    let rf = r as f64;
    let scale = tau1 * (rf * (pf - rf)).sqrt() / pf;
    let mut expected = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for (k1, row) in expected.iter_mut().enumerate() {
        for (k2, v) in row.iter_mut().enumerate() {
            let a_entry = if k1 == k2 {
                spec.diagonal()[k1]
            } else if k1 + 1 == k2 {
                spec.off_diagonal()[k1]
            } else if k2 + 1 == k1 {
                spec.off_diagonal()[k2]
            } else {
                0.0
            };
            let diag = if k1 == k2 { m as f64 * rf / pf } else { 0.0 };
            *v = Complex64::new(diag + scale * a_entry, 0.0);
        }
    }
    for row in &mut mean {
        for v in row.iter_mut() {
            *v /= count as f64;
        }
    }
    matrix_close(&mean, &expected, 1e-9).unwrap();
}

#[test]
fn degree_zero_average_is_baseline() {
    let base = make_random(3, 4, 2, 1, 3).unwrap();
    let noise = NoiseModel::new(0.5).unwrap();
    let mut mean = Complex64::new(0.0, 0.0);
    let mut count = 0;
    for_each_singleton_rhs(&base, &mut |trial| {
        mean += build_abar_complete(trial, noise, 0).unwrap()[0][0];
        count += 1;
    });
    mean /= count as f64;
    assert!((mean - Complex64::new(4.0 / 3.0, 0.0)).norm() < 1e-10);
}

#[test]
fn decoded_set_average_identity_at_odd_prime() {
    // E[Abar over decoded set] = E[Abar over complete set] - correction,
    // averaged exhaustively over singleton accepted sets. Exercises the
    // general-p diagonal of the correction matrix, not just the parity
    // specialization.
    let p = 3u64;
    let (m, n, l) = (5usize, 2usize, 1usize);
    let base = make_random(p, m, n, 1, 23).unwrap();
    let policy = DecoderPolicy::Inject {
        drops: vec![(1, 0.3)],
        seed: 6,
    };
    let (table, partition) = build_decoder(&base, l, &policy).unwrap();
    assert!(partition.gamma_max() > 0.0, "injection must bite");
    let noise = NoiseModel::new(0.25).unwrap();
    let size = l + 1;
    let mut mean_decoded = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    let mut mean_complete = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    let mut count = 0usize;
    for_each_singleton_rhs(&base, &mut |trial| {
        let decoded = build_abar_decoded(trial, noise, &table, l).unwrap();
        let complete = build_abar_complete(trial, noise, l).unwrap();
        for k1 in 0..size {
            for k2 in 0..size {
                mean_decoded[k1][k2] += decoded[k1][k2];
                mean_complete[k1][k2] += complete[k1][k2];
            }
        }
        count += 1;
    });
    let correction = build_d_correction(&base, noise, &partition).unwrap();
    let mut reconstructed = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for k1 in 0..size {
        for k2 in 0..size {
            reconstructed[k1][k2] = mean_complete[k1][k2] / count as f64 - correction[k1][k2];
            mean_decoded[k1][k2] /= count as f64;
        }
    }
    matrix_close(&mean_decoded, &reconstructed, 1e-9).unwrap();
}

#[test]
fn decoded_set_average_identity_at_parity() {
    let modulus = PrimeModulus::new(2).unwrap();
    let matrix = FpMatrix::new(
        modulus,
        6,
        3,
        vec![
            1, 0, 0, //
            0, 1, 0, //
            0, 0, 1, //
            1, 1, 0, //
            0, 1, 1, //
            1, 0, 1,
        ],
    )
    .unwrap();
    let base = MaxLinSatInstance::new(matrix, vec![vec![0]; 6]).unwrap();
    let policy = DecoderPolicy::Inject {
        drops: vec![(1, 0.5)],
        seed: 1,
    };
    let (table, partition) = build_decoder(&base, 2, &policy).unwrap();
    let noise = NoiseModel::new(0.2).unwrap();
    let size = 3;
    let mut mean_decoded = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    let mut mean_complete = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    let mut count = 0usize;
    for_each_singleton_rhs(&base, &mut |trial| {
        let decoded = build_abar_decoded(trial, noise, &table, 2).unwrap();
        let complete = build_abar_complete(trial, noise, 2).unwrap();
        for k1 in 0..size {
            for k2 in 0..size {
                mean_decoded[k1][k2] += decoded[k1][k2];
                mean_complete[k1][k2] += complete[k1][k2];
            }
        }
        count += 1;
    });
    let correction = build_d_correction(&base, noise, &partition).unwrap();
    for k1 in 0..size {
        for k2 in 0..size {
            let lhs = mean_decoded[k1][k2] / count as f64;
            let rhs = mean_complete[k1][k2] / count as f64 - correction[k1][k2];
            assert!(
                (lhs - rhs).norm() < 1e-9,
                "entry ({k1},{k2}): {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn postselected_norm_at_odd_prime_with_injection() {
    let base = make_random(5, 5, 2, 2, 2).unwrap();
    let policy = DecoderPolicy::Inject {
        drops: vec![(1, 0.25)],
        seed: 8,
    };
    let (table, partition) = build_decoder(&base, 1, &policy).unwrap();
    let coeffs =
        DqiCoefficients::new(vec![Complex64::new(0.5, 0.2), Complex64::new(-0.4, 0.6)]).unwrap();
    let (lhs, rhs) = postselected_norm_check(&base, &coeffs, &table, &partition).unwrap();
    assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
}

#[test]
fn contrast_is_monotone_in_noise() {
    // Principal coefficients, balanced-or-better sets (d >= 0): the exact
    // noisy expectation never increases with the noise rate.
    let inst = make_opi(7, 3, 3, 11).unwrap();
    let (_, coeffs) = principal_coefficients(6, 1, coupling_d(7, 3)).unwrap();
    let state = build_dqi_state(&inst, &coeffs).unwrap();
    let mut last = f64::INFINITY;
    for step in 0..=10 {
        let noise = NoiseModel::new(step as f64 / 10.0).unwrap();
        let value = expected_score_exact(&inst, &state, noise).unwrap();
        assert!(
            value <= last + 1e-12,
            "eps = {}: {value} rose above {last}",
            step as f64 / 10.0
        );
        last = value;
    }
}

#[test]
fn closed_form_with_explicit_complex_coefficients() {
    // The closed form holds for any unit coefficient vector, not only the
    // principal one.
    let inst = make_opi(7, 3, 2, 4).unwrap();
    let coeffs = DqiCoefficients::new(vec![Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.7)])
        .unwrap()
        .normalized()
        .unwrap();
    let state = build_dqi_state(&inst, &coeffs).unwrap();
    for eps in [0.0, 0.4] {
        let noise = NoiseModel::new(eps).unwrap();
        let exact = expected_score_exact(&inst, &state, noise).unwrap();
        let predicted = expected_score_closed_form(&inst, &coeffs, noise).unwrap();
        assert!(
            (exact - predicted).abs() <= 1e-9,
            "eps={eps}: {exact} vs {predicted}"
        );
    }
}
