//! The enumeration-backed identity suite behind `dqi verify`.
//!
//! Each check prints one line; any failure turns the exit code to 3. The
//! hidden `--mutate-tau` flag corrupts the row survival factor on purpose
//! so the harness can prove the checks bite.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dqi_core::decoder::{
    build_abar_complete, build_abar_decoded, build_d_correction, build_decoder,
    d_correction_offdiagonal_norm, lower_bound_experiment, postselected_norm_check, DecoderPolicy,
    RhsAverage,
};
use dqi_core::fp::{FpMatrix, PrimeModulus};
use dqi_core::instance::{make_opi, make_random, MaxLinSatInstance};
use dqi_core::noise::{expected_score_exact, noisy_output_distribution, tau_summary, NoiseModel};
use dqi_core::oracles::{
    density_matrix_oracle, p_of_t, q_reduction_check, q_reduction_check_exact, subset_expectation,
};
use dqi_core::predictor::{coupling_d, expected_score_closed_form, principal_coefficients};
use dqi_core::state::{
    build_dqi_state, fourier_state, gram_matrix, quadratic_form, AmplitudeVector, DqiCoefficients,
    FourierDirection,
};

use crate::commands::Outcome;
use crate::options::VerifyArgs;

type CheckResult = Result<String, String>;

pub fn cmd_verify(args: VerifyArgs) -> anyhow::Result<Outcome> {
    let checks: Vec<(&str, Box<dyn Fn() -> CheckResult>)> = vec![
        (
            "inner-product-zero-profile",
            Box::new(inner_product_zero_profile),
        ),
        (
            "survival-factor-reduction",
            Box::new(move || survival_factor_reduction(args.mutate_tau)),
        ),
        ("subset-phase-sums", Box::new(subset_phase_sums)),
        ("channel-reduction", Box::new(channel_reduction)),
        ("fourier-unitarity", Box::new(fourier_unitarity)),
        ("gram-identity", Box::new(gram_identity)),
        ("postselected-norm", Box::new(postselected_norm)),
        ("prediction-consistency", Box::new(prediction_consistency)),
        ("correction-average", Box::new(correction_average)),
        ("lower-bound-experiment", Box::new(lower_bound_margin)),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("ok   {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failures > 0 {
        println!("verification failed: {failures} check(s)");
        Ok(Outcome::VerificationFailed)
    } else {
        println!("verification passed");
        Ok(Outcome::Success)
    }
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// P(t) closed form vs exhaustive enumeration, plus the recurrence
/// P(t+1) = (1 - P(t)) / (p - 1), in exact rationals.
fn inner_product_zero_profile() -> CheckResult {
    let mut cases = 0;
    for p in [2u32, 3, 5, 7] {
        for len in 1..=6usize {
            let patterns: Vec<Vec<u32>> = vec![
                vec![1; len],
                (0..len).map(|j| 1 + (j as u32 % (p - 1))).collect(),
                (0..len)
                    .map(|j| 1 + ((j as u32 * 2 + 1) % (p - 1)))
                    .collect(),
            ];
            for a in patterns {
                let mut prev: Option<BigRational> = None;
                for t in 0..=len.min(6) {
                    let (formula, enumerated) = p_of_t(p, &a, t).map_err(|e| e.to_string())?;
                    if formula != enumerated {
                        return Err(format!(
                            "p={p} len={len} t={t}: formula {formula} != enumeration {enumerated}"
                        ));
                    }
                    if let Some(prev) = prev {
                        let predicted =
                            (BigRational::from(BigInt::from(1)) - &prev) / ratio(p as i64 - 1, 1);
                        if formula != predicted {
                            return Err(format!("p={p} t={t}: recurrence broken"));
                        }
                    }
                    prev = Some(formula);
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} exact cases"))
}

/// The binomial-weighted zero-probability sum collapses to (1-eps)^degree,
/// checked in floats at 1e-12 and exactly at rational noise rates.
fn survival_factor_reduction(mutate: bool) -> CheckResult {
    let mut cases = 0;
    for (p, n) in [(2u64, 6usize), (3, 5), (5, 4)] {
        let modulus = PrimeModulus::new(p).unwrap();
        let mut entries = Vec::new();
        let m = 3;
        // Row i has 2i+1 leading nonzero residues, the rest zero.
        for i in 0..m as u32 {
            for j in 0..n as u32 {
                let value = if j <= i * 2 {
                    (j % (p as u32 - 1)) + 1
                } else {
                    0
                };
                entries.push(value);
            }
        }
        let b = FpMatrix::new(modulus, m, n, entries).unwrap();
        for i in 0..m {
            let degree = b.row(i).iter().filter(|&&x| x != 0).count();
            for eps in [0.0, 0.3, 0.7, 1.0] {
                let noise = NoiseModel::new(eps).unwrap();
                let (lhs, rhs) = q_reduction_check(&b, noise, i);
                let rhs = if mutate {
                    (1.0 - eps).powi(degree as i32 + 1)
                } else {
                    rhs
                };
                if (lhs - rhs).abs() > 1e-12 {
                    return Err(format!("p={p} row={i} eps={eps}: lhs {lhs} vs rhs {rhs}"));
                }
                cases += 1;
            }
            for (num, den) in [(0i64, 1i64), (1, 4), (1, 2), (3, 4), (1, 1)] {
                let eps = ratio(num, den);
                let (lhs, mut rhs) = q_reduction_check_exact(&b, &eps, i);
                if mutate {
                    rhs *= BigRational::from(BigInt::from(1)) - &eps;
                }
                if lhs != rhs {
                    return Err(format!("p={p} row={i} eps={num}/{den}: exact mismatch"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases (float 1e-12, rational exact)"))
}

/// The three subset phase-sum values, exhaustively for p <= 7, r <= p-1.
fn subset_phase_sums() -> CheckResult {
    let mut cases = 0;
    for p in [2u32, 3, 5, 7] {
        for r in 1..p as usize {
            for y1 in 0..p {
                let (closed, enumerated) =
                    subset_expectation(p, r, &[y1]).map_err(|e| e.to_string())?;
                if closed != enumerated {
                    return Err(format!("p={p} r={r} y=({y1}): single-point mismatch"));
                }
                cases += 1;
            }
            for y1 in 1..p {
                for y2 in 1..p {
                    let (closed, enumerated) =
                        subset_expectation(p, r, &[y1, y2]).map_err(|e| e.to_string())?;
                    if closed != enumerated {
                        return Err(format!("p={p} r={r} y=({y1},{y2}): two-point mismatch"));
                    }
                    cases += 1;
                    for y3 in 1..p {
                        if p == 2 {
                            continue;
                        }
                        let (closed, enumerated) =
                            subset_expectation(p, r, &[y1, y2, y3]).map_err(|e| e.to_string())?;
                        if closed != enumerated {
                            return Err(format!(
                                "p={p} r={r} y=({y1},{y2},{y3}): three-point mismatch"
                            ));
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} exact cases"))
}

fn random_state(p: u64, n: usize, seed: u64) -> AmplitudeVector {
    let modulus = PrimeModulus::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = (p as usize).pow(n as u32);
    let amps: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    AmplitudeVector::new(modulus, n, amps)
        .unwrap()
        .normalized()
        .unwrap()
}

/// Per-axis classical replacement equals the density-matrix channel.
fn channel_reduction() -> CheckResult {
    let mut worst = 0.0f64;
    for (p, n) in [(2u64, 1usize), (2, 2), (3, 1), (3, 2)] {
        for seed in 0..25u64 {
            let state = random_state(p, n, seed * 101 + p + n as u64);
            for eps in [0.0, 0.25, 1.0] {
                let noise = NoiseModel::new(eps).unwrap();
                let dm = density_matrix_oracle(&state, noise).map_err(|e| e.to_string())?;
                let classical =
                    noisy_output_distribution(&state, noise).map_err(|e| e.to_string())?;
                for (a, b) in dm.iter().zip(&classical) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    if worst > 1e-12 {
        return Err(format!("worst deviation {worst:e} exceeds 1e-12"));
    }
    Ok(format!("worst deviation {worst:e}"))
}

fn fourier_unitarity() -> CheckResult {
    let mut worst = 0.0f64;
    for (p, n) in [(2u64, 3usize), (3, 2), (5, 2)] {
        for seed in 0..10u64 {
            let state = random_state(p, n, seed * 7 + p);
            let forward = fourier_state(&state, FourierDirection::Forward);
            worst = worst.max((forward.norm_sq() - 1.0).abs());
            let back = fourier_state(&forward, FourierDirection::Inverse);
            for (a, b) in state.amps().iter().zip(back.amps()) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    if worst > 1e-10 {
        return Err(format!("worst deviation {worst:e} exceeds 1e-10"));
    }
    Ok(format!("worst deviation {worst:e}"))
}

/// <state|state> = w^dagger M w with and without the distance condition.
fn gram_identity() -> CheckResult {
    let mut worst = 0.0f64;
    let mut cases: Vec<(MaxLinSatInstance, usize)> = vec![
        (make_opi(7, 3, 3, 2).unwrap(), 1),
        (make_random(3, 5, 2, 1, 9).unwrap(), 2),
    ];
    // Duplicated rows: distance condition broken on purpose.
    let modulus = PrimeModulus::new(2).unwrap();
    let matrix = FpMatrix::new(modulus, 4, 3, vec![1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 1]).unwrap();
    cases.push((
        MaxLinSatInstance::new(matrix, vec![vec![0], vec![1], vec![0], vec![0]]).unwrap(),
        2,
    ));
    for (inst, l) in cases {
        let coeffs = DqiCoefficients::new(
            (0..=l)
                .map(|k| Complex64::new(0.3 + 0.2 * k as f64, 0.1 * k as f64))
                .collect(),
        )
        .unwrap();
        let state = build_dqi_state(&inst, &coeffs).map_err(|e| e.to_string())?;
        let gram = gram_matrix(&inst, l).map_err(|e| e.to_string())?;
        let predicted = quadratic_form(&gram, coeffs.weights());
        worst = worst.max((state.norm_sq() - predicted.re).abs());
        worst = worst.max(predicted.im.abs());
    }
    if worst > 1e-9 {
        return Err(format!("worst deviation {worst:e} exceeds 1e-9"));
    }
    Ok(format!("worst deviation {worst:e}"))
}

/// Postselected-state norm: per-weight decoded sums, including the parity
/// specialization sum |w_k|^2 (1 - gamma_k).
fn postselected_norm() -> CheckResult {
    let mut worst = 0.0f64;
    let parity = {
        let modulus = PrimeModulus::new(2).unwrap();
        let matrix = FpMatrix::new(
            modulus,
            6,
            3,
            vec![1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1, 1, 1, 0, 1],
        )
        .unwrap();
        MaxLinSatInstance::new(matrix, vec![vec![0]; 6]).unwrap()
    };
    let policies = [
        DecoderPolicy::MinWeight,
        DecoderPolicy::Inject {
            drops: vec![(1, 0.5)],
            seed: 3,
        },
    ];
    for policy in &policies {
        let (table, partition) = build_decoder(&parity, 1, policy).map_err(|e| e.to_string())?;
        let coeffs = DqiCoefficients::from_real(&[0.6, 0.8]).unwrap();
        let (lhs, rhs) = postselected_norm_check(&parity, &coeffs, &table, &partition)
            .map_err(|e| e.to_string())?;
        worst = worst.max((lhs - rhs).abs());
        let specialization: f64 = coeffs
            .weights()
            .iter()
            .enumerate()
            .map(|(k, w)| w.norm_sqr() * (1.0 - partition.gamma(k)))
            .sum();
        worst = worst.max((lhs - specialization).abs());
    }
    // Odd prime with collisions.
    let odd = make_random(3, 5, 2, 1, 4).unwrap();
    let (table, partition) =
        build_decoder(&odd, 1, &DecoderPolicy::MinWeight).map_err(|e| e.to_string())?;
    let coeffs = DqiCoefficients::from_real(&[0.5, 0.7]).unwrap();
    let (lhs, rhs) =
        postselected_norm_check(&odd, &coeffs, &table, &partition).map_err(|e| e.to_string())?;
    worst = worst.max((lhs - rhs).abs());
    if worst > 1e-9 {
        return Err(format!("worst deviation {worst:e} exceeds 1e-9"));
    }
    Ok(format!("worst deviation {worst:e}"))
}

/// Closed-form prediction equals the exact simulator on an admissible
/// instance.
fn prediction_consistency() -> CheckResult {
    let inst = make_opi(7, 3, 3, 11).unwrap();
    let (_, coeffs) = principal_coefficients(6, 1, coupling_d(7, 3)).map_err(|e| e.to_string())?;
    let state = build_dqi_state(&inst, &coeffs).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for eps in [0.0, 0.2, 0.5, 0.9] {
        let noise = NoiseModel::new(eps).unwrap();
        let exact = expected_score_exact(&inst, &state, noise).map_err(|e| e.to_string())?;
        let predicted =
            expected_score_closed_form(&inst, &coeffs, noise).map_err(|e| e.to_string())?;
        worst = worst.max((exact - predicted).abs());
    }
    if worst > 1e-9 {
        return Err(format!("worst deviation {worst:e} exceeds 1e-9"));
    }
    Ok(format!("worst deviation {worst:e}"))
}

/// Exhaustive accepted-set average: decoded-set matrix equals complete-set
/// matrix minus the correction, and the correction's off-diagonal part
/// obeys the tau_inf (m+1) gamma_max bound.
fn correction_average() -> CheckResult {
    let modulus = PrimeModulus::new(2).unwrap();
    let matrix = FpMatrix::new(
        modulus,
        6,
        3,
        vec![1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1, 1, 1, 0, 1],
    )
    .unwrap();
    let base = MaxLinSatInstance::new(matrix, vec![vec![0]; 6]).unwrap();
    let policy = DecoderPolicy::Inject {
        drops: vec![(1, 0.4)],
        seed: 5,
    };
    let (table, partition) = build_decoder(&base, 2, &policy).map_err(|e| e.to_string())?;
    let noise = NoiseModel::new(0.2).unwrap();
    let size = 3;
    let mut mean_gap = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    let m = base.num_constraints();
    for bits in 0..(1u32 << m) {
        let sets: Vec<Vec<u32>> = (0..m).map(|i| vec![(bits >> i) & 1]).collect();
        let trial = base.with_sets(sets).map_err(|e| e.to_string())?;
        let decoded = build_abar_decoded(&trial, noise, &table, 2).map_err(|e| e.to_string())?;
        let complete = build_abar_complete(&trial, noise, 2).map_err(|e| e.to_string())?;
        for k1 in 0..size {
            for k2 in 0..size {
                mean_gap[k1][k2] += complete[k1][k2] - decoded[k1][k2];
            }
        }
    }
    let correction = build_d_correction(&base, noise, &partition).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for k1 in 0..size {
        for k2 in 0..size {
            let mean = mean_gap[k1][k2] / (1u32 << m) as f64;
            worst = worst.max((mean - Complex64::new(correction[k1][k2], 0.0)).norm());
        }
    }
    if worst > 1e-9 {
        return Err(format!("average identity deviation {worst:e} exceeds 1e-9"));
    }
    let gap = d_correction_offdiagonal_norm(&base, &correction, &partition);
    let tau = tau_summary(base.matrix(), noise);
    let bound = tau.tau_inf() * (m + 1) as f64 * partition.gamma_max();
    if gap > bound + 1e-12 {
        return Err(format!("off-diagonal norm {gap} exceeds bound {bound}"));
    }
    Ok(format!(
        "average identity deviation {worst:e}; off-diagonal norm {gap:.3e} <= {bound:.3e}"
    ))
}

/// Measured rhs-averaged score stays above both penalty variants of the
/// lower bound.
fn lower_bound_margin() -> CheckResult {
    let modulus = PrimeModulus::new(2).unwrap();
    let matrix = FpMatrix::new(
        modulus,
        6,
        3,
        vec![1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1, 1, 1, 0, 1],
    )
    .unwrap();
    let inst = MaxLinSatInstance::new(matrix, vec![vec![0]; 6]).unwrap();
    let (_, coeffs) = principal_coefficients(6, 1, 0.0).map_err(|e| e.to_string())?;
    let policy = DecoderPolicy::Inject {
        drops: vec![(1, 0.3)],
        seed: 2,
    };
    let (table, partition) = build_decoder(&inst, 1, &policy).map_err(|e| e.to_string())?;
    let mut margin = f64::INFINITY;
    for eps in [0.0, 0.2] {
        let noise = NoiseModel::new(eps).unwrap();
        let outcome = lower_bound_experiment(
            &inst,
            &coeffs,
            noise,
            &table,
            &partition,
            RhsAverage::Exhaustive,
        )
        .map_err(|e| e.to_string())?;
        if outcome.measured_mean < outcome.bound_linear - 1e-9 {
            return Err(format!(
                "eps={eps}: measured {} below bound {}",
                outcome.measured_mean, outcome.bound_linear
            ));
        }
        margin = margin.min(outcome.measured_mean - outcome.bound_linear);
    }
    Ok(format!("minimum margin {margin:.6}"))
}
