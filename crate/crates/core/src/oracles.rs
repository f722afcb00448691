//! Independent brute-force verification of the identities behind the
//! predictor and the decoder machinery.
//!
//! Everything here is enumeration-first: probabilities of zero inner
//! products over fixed-weight vectors, phase sums over random accepted-value
//! subsets, and a tiny density-matrix implementation of the depolarizing
//! channel. The closed-form identities are checked in exact rational
//! arithmetic; sums of p-th roots of unity are tracked as integer
//! coefficient vectors and reduced only when the result is provably
//! rational, so there is no tolerance to argue about.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fp::{binomial_u128, for_each_weight_k_vector, weight_class_size, FpMatrix};
use crate::noise::NoiseModel;
use crate::state::AmplitudeVector;

/// Dimension cap for the density-matrix oracle.
pub const DENSITY_ORACLE_MAX_DIM: usize = 81;

/// Integer combination of p-th roots of unity: value = sum_j counts[j] w^j.
///
/// Rational iff, after reduction by 1 + w + ... + w^(p-1) = 0, no w term
/// remains; equivalently counts[1] = ... = counts[p-1], giving the value
/// counts[0] - counts[1].
#[derive(Debug, Clone)]
pub struct RootOfUnitySum {
    p: u32,
    counts: Vec<BigInt>,
}

impl RootOfUnitySum {
    pub fn new(p: u32) -> Self {
        Self {
            p,
            counts: vec![BigInt::zero(); p as usize],
        }
    }

    pub fn add(&mut self, exponent: u32, amount: i64) {
        self.counts[(exponent % self.p) as usize] += amount;
    }

    /// Extracts the rational value, failing if any root-of-unity component
    /// survives.
    pub fn into_rational(self) -> Result<BigRational> {
        let head = self.counts[1..]
            .first()
            .cloned()
            .unwrap_or_else(BigInt::zero);
        if self.counts[1..].iter().any(|c| *c != head) {
            return Err(Error::InvalidParameter("phase sum is not rational".into()));
        }
        Ok(BigRational::from(self.counts[0].clone() - head))
    }
}

fn big(v: i64) -> BigRational {
    BigRational::from(BigInt::from(v))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    BigInt::from(binomial_u128(n, k))
}

/// Closed form and exhaustive enumeration of the probability that a
/// fixed all-nonzero vector has zero inner product with a uniform weight-t
/// vector: P(t) = 1/p + (-1/(p-1))^t (p-1)/p.
pub fn p_of_t(p: u32, a: &[u32], t: usize) -> Result<(BigRational, BigRational)> {
    if a.is_empty() || t > a.len() {
        return Err(Error::InvalidParameter(format!(
            "weight t = {t} outside 0..={}",
            a.len()
        )));
    }
    if a.iter().any(|&ai| ai == 0 || ai >= p) {
        return Err(Error::InvalidParameter(
            "anchor vector entries must be nonzero residues".into(),
        ));
    }
    let formula =
        ratio(1, p as i64) + ratio(-1, p as i64 - 1).pow(t as i32) * ratio(p as i64 - 1, p as i64);

    let len = a.len();
    let mut zeros = BigInt::zero();
    for_each_weight_k_vector(len, t, p, &mut |v| {
        let dot: u64 = a
            .iter()
            .zip(v)
            .map(|(&ai, &vi)| ai as u64 * vi as u64)
            .sum();
        if dot % p as u64 == 0 {
            zeros += 1;
        }
        true
    });
    let total = BigInt::from(weight_class_size(len, t, p));
    let enumerated = BigRational::new(zeros, total);
    Ok((formula, enumerated))
}

/// Exact probability that row i of B has zero inner product with a uniform
/// weight-t vector of F_p^n.
pub fn q_probability(b: &FpMatrix, i: usize, t: usize) -> BigRational {
    let p = b.modulus().get();
    let n = b.cols();
    let row = b.row(i);
    let mut zeros = BigInt::zero();
    for_each_weight_k_vector(n, t, p, &mut |u| {
        let dot: u64 = row
            .iter()
            .zip(u)
            .map(|(&bi, &ui)| bi as u64 * ui as u64)
            .sum();
        if dot % p as u64 == 0 {
            zeros += 1;
        }
        true
    });
    BigRational::new(zeros, BigInt::from(weight_class_size(n, t, p)))
}

/// Both sides of the binomial reduction identity for row i: the weighted
/// sum over inner-product-zero probabilities collapses to the row survival
/// factor (1-eps)^|b_i|. Floating-point route.
pub fn q_reduction_check(b: &FpMatrix, noise: NoiseModel, i: usize) -> (f64, f64) {
    let p = b.modulus().get() as f64;
    let n = b.cols();
    let eps = noise.epsilon();
    let mut lhs = 0.0;
    for t in 0..=n {
        let q = {
            let exact = q_probability(b, i, t);
            rational_to_f64(&exact)
        };
        let ways = binomial_u128(n, t) as f64 * (p - 1.0).powi(t as i32);
        let weight = (eps / p).powi(t as i32) * (1.0 - (p - 1.0) * eps / p).powi((n - t) as i32);
        lhs += ways * weight * (p / (p - 1.0) * q - 1.0 / (p - 1.0));
    }
    let degree = b.row(i).iter().filter(|&&x| x != 0).count();
    let rhs = (1.0 - eps).powi(degree as i32);
    (lhs, rhs)
}

/// The same identity in exact rational arithmetic for a rational noise
/// rate; equality is exact, not approximate.
pub fn q_reduction_check_exact(
    b: &FpMatrix,
    epsilon: &BigRational,
    i: usize,
) -> (BigRational, BigRational) {
    let p = b.modulus().get();
    let n = b.cols();
    let p_big = big(p as i64);
    let eps_over_p = epsilon / &p_big;
    let survive = BigRational::one() - big(p as i64 - 1) * &eps_over_p;
    let mut lhs = BigRational::zero();
    for t in 0..=n {
        let q = q_probability(b, i, t);
        let ways = BigRational::from(binomial_big(n, t))
            * BigRational::from(BigInt::from(p as i64 - 1)).pow(t as i32);
        let weight = eps_over_p.pow(t as i32) * survive.pow((n - t) as i32);
        let centered = &p_big / big(p as i64 - 1) * q - ratio(1, p as i64 - 1);
        lhs += ways * weight * centered;
    }
    let degree = b.row(i).iter().filter(|&&x| x != 0).count();
    let rhs = (BigRational::one() - epsilon.clone()).pow(degree as i32);
    (lhs, rhs)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // Desk-scale numerators fit comfortably in i128.
    let numer: f64 = i128::try_from(r.numer().clone())
        .map(|v| v as f64)
        .unwrap_or(f64::NAN);
    let denom: f64 = i128::try_from(r.denom().clone())
        .map(|v| v as f64)
        .unwrap_or(f64::NAN);
    numer / denom
}

/// Expected phase sum over a uniformly random r-subset F of F_p:
/// E_F sum_{x in F^k} w^(x . y), with its closed form.
///
/// The closed form is zero whenever the components of y do not sum to zero;
/// on the sum-zero slice, the one-, two- and three-point values are r,
/// r - r(r-1)/(p-1) and r(p-r)(p-2r)/((p-1)(p-2)) respectively (the latter
/// two for all-nonzero y).
pub fn subset_expectation(p: u32, r: usize, y: &[u32]) -> Result<(BigRational, BigRational)> {
    if r == 0 || r as u64 > p as u64 - 1 {
        return Err(Error::InvalidParameter(format!(
            "subset size r = {r} outside 1..={}",
            p - 1
        )));
    }
    if y.is_empty() || y.len() > 3 {
        return Err(Error::InvalidParameter(
            "phase vector length must be 1, 2 or 3".into(),
        ));
    }
    if y.iter().any(|&yi| yi >= p) {
        return Err(Error::InvalidParameter(
            "phase entries must be residues".into(),
        ));
    }

    let total: u32 = y.iter().sum();
    let closed = if total % p != 0 {
        BigRational::zero()
    } else {
        match y.len() {
            1 => big(r as i64),
            2 => {
                if y.iter().any(|&yi| yi == 0) {
                    return Err(Error::InvalidParameter(
                        "two-point value requires nonzero entries".into(),
                    ));
                }
                big(r as i64) - ratio((r * (r - 1)) as i64, p as i64 - 1)
            }
            3 => {
                if y.iter().any(|&yi| yi == 0) {
                    return Err(Error::InvalidParameter(
                        "three-point value requires nonzero entries".into(),
                    ));
                }
                if p == 2 {
                    return Err(Error::InvalidParameter(
                        "three-point value undefined at p = 2".into(),
                    ));
                }
                let num = r as i64 * (p as i64 - r as i64) * (p as i64 - 2 * r as i64);
                let den = (p as i64 - 1) * (p as i64 - 2);
                ratio(num, den)
            }
            _ => unreachable!(),
        }
    };

    // Exhaustive average over all C(p, r) subsets, phases tracked exactly.
    let mut sum = RootOfUnitySum::new(p);
    let mut subset: Vec<u32> = (0..r as u32).collect();
    loop {
        let mut tuple = vec![0usize; y.len()];
        loop {
            let exponent: u64 = tuple
                .iter()
                .zip(y)
                .map(|(&slot, &yi)| subset[slot] as u64 * yi as u64)
                .sum();
            sum.add((exponent % p as u64) as u32, 1);
            let mut slot = y.len();
            for j in (0..y.len()).rev() {
                if tuple[j] + 1 < r {
                    tuple[j] += 1;
                    slot = j;
                    break;
                }
                tuple[j] = 0;
            }
            if slot == y.len() {
                break;
            }
        }
        // Next r-combination of F_p.
        let mut idx = r;
        for j in (0..r).rev() {
            if subset[j] != (j as u32) + p - r as u32 {
                idx = j;
                break;
            }
        }
        if idx == r {
            break;
        }
        subset[idx] += 1;
        for j in idx + 1..r {
            subset[j] = subset[j - 1] + 1;
        }
    }
    let enumerated = sum.into_rational()? / BigRational::from(binomial_big(p as usize, r));
    Ok((closed, enumerated))
}

/// Applies the depolarizing channel to |psi><psi| one qudit at a time and
/// reads out the diagonal. Quadratic in the state dimension, so capped at
/// tiny sizes; exists to validate the classical per-axis reduction.
pub fn density_matrix_oracle(state: &AmplitudeVector, noise: NoiseModel) -> Result<Vec<f64>> {
    let len = state.len();
    if len > DENSITY_ORACLE_MAX_DIM {
        return Err(Error::BudgetExceeded {
            context: "density matrix oracle",
            needed: len as u128,
            budget: DENSITY_ORACLE_MAX_DIM as u128,
        });
    }
    let deviation = (state.norm_sq().sqrt() - 1.0).abs();
    if deviation > 1e-6 {
        return Err(Error::NotNormalized { deviation });
    }
    let p = state.modulus().get() as usize;
    let n = state.num_qudits();
    let eps = noise.epsilon();
    let mut rho: Vec<Complex64> = (0..len * len)
        .map(|ab| {
            let (a, b) = (ab / len, ab % len);
            state.amps()[a] * state.amps()[b].conj()
        })
        .collect();
    for axis in 0..n {
        let stride = p.pow((n - 1 - axis) as u32);
        let digit = |idx: usize| (idx / stride) % p;
        let rebase = |idx: usize, z: usize| idx - digit(idx) * stride + z * stride;
        let mut next = vec![Complex64::new(0.0, 0.0); len * len];
        for a in 0..len {
            for b in 0..len {
                let mut value = rho[a * len + b] * (1.0 - eps);
                if digit(a) == digit(b) {
                    let mut traced = Complex64::new(0.0, 0.0);
                    for z in 0..p {
                        traced += rho[rebase(a, z) * len + rebase(b, z)];
                    }
                    value += traced * (eps / p as f64);
                }
                next[a * len + b] = value;
            }
        }
        rho = next;
    }
    Ok((0..len).map(|a| rho[a * len + a].re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::PrimeModulus;
    use crate::noise::noisy_output_distribution;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn p_of_t_fixed_values() {
        // t = 0 is the empty condition.
        let (formula, enumerated) = p_of_t(3, &[1, 2, 1], 0).unwrap();
        assert_eq!(formula, big(1));
        assert_eq!(enumerated, big(1));

        // p=3, t=2: 1/3 + (1/4)(2/3) = 1/2.
        let (formula, enumerated) = p_of_t(3, &[1, 1, 2, 2], 2).unwrap();
        assert_eq!(formula, ratio(1, 2));
        assert_eq!(enumerated, formula);

        // p=2, t=1: a single flipped coordinate always breaks the zero sum.
        let (formula, enumerated) = p_of_t(2, &[1, 1, 1], 1).unwrap();
        assert_eq!(formula, BigRational::zero());
        assert_eq!(enumerated, formula);
    }

    #[test]
    fn p_of_t_enumeration_matches_formula_broadly() {
        for p in [2u32, 3, 5] {
            for len in 1..=5usize {
                let a: Vec<u32> = (0..len).map(|j| 1 + (j as u32 % (p - 1))).collect();
                for t in 0..=len {
                    let (formula, enumerated) = p_of_t(p, &a, t).unwrap();
                    assert_eq!(formula, enumerated, "p={p} len={len} t={t}");
                }
            }
        }
    }

    #[test]
    fn p_of_t_recurrence() {
        // P(t+1) = (1 - P(t)) / (p - 1), exactly.
        for p in [2u32, 3, 5, 7] {
            let a: Vec<u32> = vec![1; 5];
            let mut prev = p_of_t(p, &a, 0).unwrap().0;
            for t in 1..=5 {
                let current = p_of_t(p, &a, t).unwrap().0;
                let predicted = (BigRational::one() - &prev) / big(p as i64 - 1);
                assert_eq!(current, predicted, "p={p} t={t}");
                prev = current;
            }
        }
    }

    #[test]
    fn p_of_t_rejects_zero_entries() {
        assert!(p_of_t(3, &[1, 0], 1).is_err());
        assert!(p_of_t(3, &[1, 1], 3).is_err());
    }

    #[test]
    fn q_reduction_trivial_cases() {
        let modulus = PrimeModulus::new(3).unwrap();
        let b = FpMatrix::new(modulus, 2, 4, vec![1, 2, 0, 0, 0, 0, 0, 0]).unwrap();
        let (lhs, rhs) = q_reduction_check(&b, NoiseModel::NOISELESS, 0);
        assert!((lhs - 1.0).abs() < 1e-12 && (rhs - 1.0).abs() < 1e-12);

        // All-zero row: both sides are 1 at any rate.
        let (lhs, rhs) = q_reduction_check(&b, NoiseModel::new(0.8).unwrap(), 1);
        assert!((lhs - 1.0).abs() < 1e-12 && (rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_reduction_degree_two() {
        let modulus = PrimeModulus::new(3).unwrap();
        let b = FpMatrix::new(modulus, 1, 4, vec![1, 2, 0, 0]).unwrap();
        let (lhs, rhs) = q_reduction_check(&b, NoiseModel::new(0.3).unwrap(), 0);
        assert!((rhs - 0.49).abs() < 1e-15);
        assert!((lhs - rhs).abs() < 1e-12, "lhs {lhs}, rhs {rhs}");
    }

    #[test]
    fn q_reduction_exact_equality() {
        let modulus = PrimeModulus::new(5).unwrap();
        let b = FpMatrix::new(modulus, 2, 4, vec![1, 3, 0, 2, 4, 0, 0, 0]).unwrap();
        for (num, den) in [(0i64, 1i64), (1, 4), (1, 2), (3, 4), (1, 1)] {
            let eps = ratio(num, den);
            for i in 0..2 {
                let (lhs, rhs) = q_reduction_check_exact(&b, &eps, i);
                assert_eq!(lhs, rhs, "eps = {num}/{den}, row {i}");
            }
        }
    }

    #[test]
    fn subset_expectation_fixed_values() {
        // Nonzero component sum: expectation vanishes.
        let (closed, enumerated) = subset_expectation(5, 2, &[1, 1]).unwrap();
        assert_eq!(closed, BigRational::zero());
        assert_eq!(enumerated, closed);

        // p=3, r=2, y=(1,2): 2 - 2*1/2 = 1.
        let (closed, enumerated) = subset_expectation(3, 2, &[1, 2]).unwrap();
        assert_eq!(closed, big(1));
        assert_eq!(enumerated, closed);

        // p=5, r=2, y=(1,1,3): 2*3*1/(4*3) = 1/2.
        let (closed, enumerated) = subset_expectation(5, 2, &[1, 1, 3]).unwrap();
        assert_eq!(closed, ratio(1, 2));
        assert_eq!(enumerated, closed);

        // Single zero component: the subset size itself.
        let (closed, enumerated) = subset_expectation(7, 3, &[0]).unwrap();
        assert_eq!(closed, big(3));
        assert_eq!(enumerated, closed);
    }

    #[test]
    fn subset_expectation_domain_errors() {
        assert!(subset_expectation(3, 2, &[0, 0]).is_err());
        assert!(subset_expectation(5, 2, &[0, 1, 4]).is_err());
        assert!(subset_expectation(5, 0, &[1]).is_err());
        assert!(subset_expectation(5, 5, &[1]).is_err());
        assert!(subset_expectation(5, 2, &[1, 1, 1, 2]).is_err());
    }

    #[test]
    fn subset_expectation_exhaustive_small_fields() {
        for p in [3u32, 5, 7] {
            for r in 1..p as usize {
                for y1 in 1..p {
                    let (closed, enumerated) = subset_expectation(p, r, &[y1, p - y1]).unwrap();
                    assert_eq!(closed, enumerated, "p={p} r={r} y=({y1},{})", p - y1);
                }
            }
        }
    }

    #[test]
    fn density_oracle_single_qubit_hand_case() {
        let modulus = PrimeModulus::new(2).unwrap();
        let amps = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let state = AmplitudeVector::new(modulus, 1, amps).unwrap();
        let eps = 0.4;
        let diag = density_matrix_oracle(&state, NoiseModel::new(eps).unwrap()).unwrap();
        // (1-eps)|a|^2 + eps/2 on each outcome.
        assert!((diag[0] - (0.6 * 0.36 + 0.2)).abs() < 1e-15);
        assert!((diag[1] - (0.6 * 0.64 + 0.2)).abs() < 1e-15);
    }

    #[test]
    fn density_oracle_extremes() {
        let modulus = PrimeModulus::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let amps: Vec<Complex64> = (0..9)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let state = AmplitudeVector::new(modulus, 2, amps)
            .unwrap()
            .normalized()
            .unwrap();
        let clean = density_matrix_oracle(&state, NoiseModel::NOISELESS).unwrap();
        for (d, a) in clean.iter().zip(state.amps()) {
            assert!((d - a.norm_sqr()).abs() < 1e-14);
        }
        let mixed = density_matrix_oracle(&state, NoiseModel::new(1.0).unwrap()).unwrap();
        for &d in &mixed {
            assert!((d - 1.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn density_oracle_agrees_with_classical_reduction() {
        for (p, n) in [(2u64, 1usize), (2, 2), (3, 1), (3, 2)] {
            let modulus = PrimeModulus::new(p).unwrap();
            let len = (p as usize).pow(n as u32);
            for seed in 0..20u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed * 31 + p + n as u64);
                let amps: Vec<Complex64> = (0..len)
                    .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect();
                let state = AmplitudeVector::new(modulus, n, amps)
                    .unwrap()
                    .normalized()
                    .unwrap();
                for eps in [0.0, 0.25, 0.4, 1.0] {
                    let noise = NoiseModel::new(eps).unwrap();
                    let dm = density_matrix_oracle(&state, noise).unwrap();
                    let classical = noisy_output_distribution(&state, noise).unwrap();
                    for (a, b) in dm.iter().zip(&classical) {
                        assert!((a - b).abs() < 1e-12, "p={p} n={n} eps={eps}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn density_oracle_rejects_large_dimension() {
        let modulus = PrimeModulus::new(3).unwrap();
        let state = AmplitudeVector::zeros(modulus, 5).unwrap();
        assert!(matches!(
            density_matrix_oracle(&state, NoiseModel::NOISELESS),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn root_of_unity_sum_detects_irrational_remainder() {
        let mut sum = RootOfUnitySum::new(5);
        sum.add(0, 3);
        sum.add(1, 1);
        assert!(sum.into_rational().is_err());

        let mut sum = RootOfUnitySum::new(5);
        sum.add(0, 3);
        for j in 1..5 {
            sum.add(j, 2);
        }
        assert_eq!(sum.into_rational().unwrap(), big(1));
    }
}
