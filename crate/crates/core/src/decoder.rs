//! The imperfect-decoder regime: syndrome lookup tables, the split of error
//! strings into correctly decoded and misidentified sets, the postselected
//! state they induce, and quadratic-form matrices that predict its noisy
//! score exactly.
//!
//! The concrete decoder is a minimum-weight coset-leader table with a
//! lexicographic tie-break. A policy hook drops a seeded fraction of table
//! entries per weight so nonzero failure rates can be produced on demand,
//! even when the code distance would otherwise make decoding perfect.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::accum::KahanSum;
use crate::error::{Error, Result};
use crate::fp::{binomial_u128, for_each_weight_k_vector, weight_class_size, FpVector};
use crate::instance::MaxLinSatInstance;
use crate::noise::{expected_score_exact, tau_summary, NoiseModel};
use crate::predictor::{parity_lower_bound, PenaltyExponent};
use crate::state::{
    build_dqi_state, build_g_table, fourier_state, AmplitudeVector, DqiCoefficients,
    FourierDirection, GTable,
};

/// Cap on the number of weight-limited errors a decoder build may touch.
pub const DECODER_ENUM_BUDGET: u128 = 2_000_000;

/// Cap on error pairs the quadratic-form matrix build may touch.
pub const PAIR_ENUM_BUDGET: u128 = 25_000_000;

/// Syndrome-to-error lookup covering errors of weight at most l.
#[derive(Debug, Clone)]
pub struct SyndromeTable {
    max_weight: usize,
    map: HashMap<Vec<u32>, Vec<u32>>,
    collisions: usize,
    dropped: usize,
}

impl SyndromeTable {
    #[inline]
    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Number of colliding insertions observed while building.
    #[inline]
    pub fn collisions(&self) -> usize {
        self.collisions
    }

    /// Number of entries removed by the failure-injection policy.
    #[inline]
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn lookup(&self, syndrome: &[u32]) -> Option<&[u32]> {
        self.map.get(syndrome).map(Vec::as_slice)
    }

    /// Whether the decoder recovers exactly this error from its syndrome.
    pub fn decodes(&self, error: &[u32], syndrome: &[u32]) -> bool {
        self.map.get(syndrome).is_some_and(|stored| stored == error)
    }

    /// Plaintext export, one `syndrome : error` line per entry, sorted by
    /// syndrome digits.
    pub fn export(&self, mut w: impl Write) -> Result<()> {
        let mut rows: Vec<(&Vec<u32>, &Vec<u32>)> = self.map.iter().collect();
        rows.sort();
        for (syndrome, error) in rows {
            let s: Vec<String> = syndrome.iter().map(u32::to_string).collect();
            let e: Vec<String> = error.iter().map(u32::to_string).collect();
            writeln!(w, "{} : {}", s.join(" "), e.join(" "))?;
        }
        Ok(())
    }
}

/// Per-weight split into decoded (D_k) and misidentified (F_k) errors, with
/// exact failure rates gamma_k = |F_k| / ((p-1)^k C(m,k)).
#[derive(Debug, Clone)]
pub struct DecoderPartition {
    classes: Vec<WeightClass>,
    gamma_max: f64,
}

#[derive(Debug, Clone)]
pub struct WeightClass {
    pub decoded: Vec<FpVector>,
    pub failed: Vec<FpVector>,
    class_size: u128,
}

impl WeightClass {
    #[inline]
    pub fn class_size(&self) -> u128 {
        self.class_size
    }

    pub fn gamma(&self) -> f64 {
        self.failed.len() as f64 / self.class_size as f64
    }
}

impl DecoderPartition {
    #[inline]
    pub fn max_weight(&self) -> usize {
        self.classes.len() - 1
    }

    #[inline]
    pub fn class(&self, k: usize) -> &WeightClass {
        &self.classes[k]
    }

    #[inline]
    pub fn classes(&self) -> &[WeightClass] {
        &self.classes
    }

    pub fn gamma(&self, k: usize) -> f64 {
        self.classes[k].gamma()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.classes.iter().map(WeightClass::gamma).collect()
    }

    #[inline]
    pub fn gamma_max(&self) -> f64 {
        self.gamma_max
    }

    /// Membership set of the misidentified errors.
    pub fn failed_set(&self) -> HashSet<&[u32]> {
        self.classes
            .iter()
            .flat_map(|c| c.failed.iter().map(FpVector::entries))
            .collect()
    }
}

/// How the syndrome table is built.
#[derive(Debug, Clone, PartialEq)]
pub enum DecoderPolicy {
    /// Minimum-weight coset leaders, lexicographic tie-break.
    MinWeight,
    /// As `MinWeight`, then drop seeded random entries per weight until the
    /// failure rate at each listed weight reaches the rounded fraction.
    Inject { drops: Vec<(usize, f64)>, seed: u64 },
}

fn check_weight_budget(m: usize, p: u32, l: usize) -> Result<()> {
    let needed: u128 = (0..=l).map(|k| weight_class_size(m, k, p)).sum();
    if needed > DECODER_ENUM_BUDGET {
        return Err(Error::BudgetExceeded {
            context: "decoder error enumeration",
            needed,
            budget: DECODER_ENUM_BUDGET,
        });
    }
    Ok(())
}

/// Builds the syndrome table for all errors of weight <= l and the induced
/// decoded/failed partition. Without injection and with 2l+1 < d_perp every
/// failure rate is zero.
pub fn build_decoder(
    inst: &MaxLinSatInstance,
    l: usize,
    policy: &DecoderPolicy,
) -> Result<(SyndromeTable, DecoderPartition)> {
    let m = inst.num_constraints();
    let p = inst.modulus().get();
    if l > m {
        return Err(Error::InvalidParameter(format!(
            "decoder weight l = {l} exceeds the constraint count m = {m}"
        )));
    }
    check_weight_budget(m, p, l)?;

    let mut map: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
    let mut collisions = 0usize;
    for k in 0..=l {
        for_each_weight_k_vector(m, k, p, &mut |y| {
            let yv = FpVector::new(inst.modulus(), y.to_vec()).unwrap();
            let syndrome = inst.matrix().transpose_mat_vec(&yv).unwrap();
            match map.entry(syndrome.entries().to_vec()) {
                std::collections::hash_map::Entry::Vacant(slot) => {
                    slot.insert(y.to_vec());
                }
                std::collections::hash_map::Entry::Occupied(mut slot) => {
                    collisions += 1;
                    // Enumeration runs weight-ascending, so the stored error
                    // never has larger weight; break weight ties toward the
                    // lexicographically smaller error.
                    let stored = slot.get_mut();
                    let stored_weight = stored.iter().filter(|&&e| e != 0).count();
                    if stored_weight == k && y < stored.as_slice() {
                        *stored = y.to_vec();
                    }
                }
            }
            true
        });
    }

    let mut dropped = 0usize;
    if let DecoderPolicy::Inject { drops, seed } = policy {
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        for &(weight, fraction) in drops {
            if weight > l {
                return Err(Error::InvalidParameter(format!(
                    "injection weight {weight} exceeds the decoder range {l}"
                )));
            }
            if !(0.0..=1.0).contains(&fraction) {
                return Err(Error::InvalidParameter(format!(
                    "injection fraction {fraction} outside [0, 1]"
                )));
            }
            let class_size = weight_class_size(m, weight, p);
            let target_failed = (fraction * class_size as f64).round() as u128;
            // Stored errors of this weight, in canonical order.
            let mut stored: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
            for_each_weight_k_vector(m, weight, p, &mut |y| {
                let yv = FpVector::new(inst.modulus(), y.to_vec()).unwrap();
                let syndrome = inst.matrix().transpose_mat_vec(&yv).unwrap();
                if map.get(syndrome.entries()).is_some_and(|e| e == y) {
                    stored.push((syndrome.entries().to_vec(), y.to_vec()));
                }
                true
            });
            let already_failed = class_size - stored.len() as u128;
            let need = target_failed.saturating_sub(already_failed) as usize;
            if need > stored.len() {
                return Err(Error::InvalidParameter(format!(
                    "cannot reach failure rate {fraction} at weight {weight}"
                )));
            }
            for slot in 0..need {
                let pick = rng.random_range(slot..stored.len());
                stored.swap(slot, pick);
            }
            for (syndrome, _) in stored.iter().take(need) {
                map.remove(syndrome);
                dropped += 1;
            }
        }
    }

    let table = SyndromeTable {
        max_weight: l,
        map,
        collisions,
        dropped,
    };

    let mut classes = Vec::with_capacity(l + 1);
    for k in 0..=l {
        let mut decoded = Vec::new();
        let mut failed = Vec::new();
        for_each_weight_k_vector(m, k, p, &mut |y| {
            let yv = FpVector::new(inst.modulus(), y.to_vec()).unwrap();
            let syndrome = inst.matrix().transpose_mat_vec(&yv).unwrap();
            if table.decodes(y, syndrome.entries()) {
                decoded.push(yv);
            } else {
                failed.push(yv);
            }
            true
        });
        classes.push(WeightClass {
            decoded,
            failed,
            class_size: weight_class_size(m, k, p),
        });
    }
    let gamma_max = classes.iter().map(WeightClass::gamma).fold(0.0, f64::max);
    Ok((table, DecoderPartition { classes, gamma_max }))
}

/// The unnormalized postselected state: only errors the decoder recovers
/// contribute on the Fourier side, then the inverse transform is applied.
pub fn build_imperfect_state(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
    table: &SyndromeTable,
) -> Result<AmplitudeVector> {
    let m = inst.num_constraints();
    let p = inst.modulus().get();
    let l = coeffs.degree();
    if l > table.max_weight() {
        return Err(Error::InvalidParameter(format!(
            "coefficient degree {l} exceeds the decoder range {}",
            table.max_weight()
        )));
    }
    check_weight_budget(m, p, l)?;
    let g = build_g_table(inst);
    let mut fourier_side = AmplitudeVector::zeros(inst.modulus(), inst.num_variables())?;
    for k in 0..=l {
        let scale = coeffs.weights()[k] / (binomial_u128(m, k) as f64).sqrt();
        for_each_weight_k_vector(m, k, p, &mut |y| {
            let yv = FpVector::new(inst.modulus(), y.to_vec()).unwrap();
            let syndrome = inst.matrix().transpose_mat_vec(&yv).unwrap();
            if table.decodes(y, syndrome.entries()) {
                let idx = fourier_side.index_of(syndrome.entries());
                let value = scale * g.g_tilde_product(y);
                fourier_side.amps_mut()[idx] += value;
            }
            true
        });
    }
    Ok(fourier_state(&fourier_side, FourierDirection::Inverse))
}

/// Squared norm of the postselected state two ways: from the state vector
/// itself and from the per-weight sum of |g_tilde|^2 over decoded errors.
pub fn postselected_norm_check(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
    table: &SyndromeTable,
    partition: &DecoderPartition,
) -> Result<(f64, f64)> {
    let state = build_imperfect_state(inst, coeffs, table)?;
    let g = build_g_table(inst);
    let m = inst.num_constraints();
    let mut rhs = KahanSum::default();
    for (k, class) in partition.classes().iter().enumerate() {
        if k > coeffs.degree() {
            break;
        }
        let weight = coeffs.weights()[k].norm_sqr() / binomial_u128(m, k) as f64;
        for y in &class.decoded {
            rhs.add(weight * g.g_tilde_product(y.entries()).norm_sqr());
        }
    }
    Ok((state.norm_sq(), rhs.value()))
}

/// Exact noisy expectation of the imperfect-decoder output: normalize the
/// postselected state, apply the noise reduction, integrate the score.
pub fn expected_score_imperfect(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
    noise: NoiseModel,
    table: &SyndromeTable,
) -> Result<f64> {
    let state = build_imperfect_state(inst, coeffs, table)?;
    if state.norm_sq() < 1e-14 {
        return Err(Error::ZeroNorm);
    }
    expected_score_exact(inst, &state.normalized()?, noise)
}

struct ErrorEntry {
    weight: usize,
    g_tilde: Complex64,
    syndrome: Vec<u32>,
}

fn collect_entries(
    inst: &MaxLinSatInstance,
    g: &GTable,
    l: usize,
    filter: Option<&SyndromeTable>,
) -> Vec<ErrorEntry> {
    let m = inst.num_constraints();
    let p = inst.modulus().get();
    let mut entries = Vec::new();
    for k in 0..=l {
        for_each_weight_k_vector(m, k, p, &mut |y| {
            let yv = FpVector::new(inst.modulus(), y.to_vec()).unwrap();
            let syndrome = inst.matrix().transpose_mat_vec(&yv).unwrap();
            let keep = match filter {
                Some(table) => table.decodes(y, syndrome.entries()),
                None => true,
            };
            if keep {
                entries.push(ErrorEntry {
                    weight: k,
                    g_tilde: g.g_tilde_product(y),
                    syndrome: syndrome.entries().to_vec(),
                });
            }
            true
        });
    }
    entries
}

/// Quadratic-form matrix of the noisy score for the decoded error set D:
/// the noisy expectation equals w^dagger Abar w / <state|state>.
///
/// The per-qudit noise average collapses analytically: summing the mixing
/// weights against the phase of row i leaves the factor tau_i =
/// (1-eps)^|b_i| (and exactly 1 for the identity shift), so only pairs of
/// decoded errors with matching syndrome offsets are enumerated.
pub fn build_abar_decoded(
    inst: &MaxLinSatInstance,
    noise: NoiseModel,
    table: &SyndromeTable,
    l: usize,
) -> Result<Vec<Vec<Complex64>>> {
    if l > table.max_weight() {
        return Err(Error::InvalidParameter(format!(
            "degree {l} exceeds the decoder range {}",
            table.max_weight()
        )));
    }
    build_abar_over(inst, noise, l, Some(table))
}

/// Same matrix over the complete weight-limited error set (a perfect
/// decoder on every weight up to l).
pub fn build_abar_complete(
    inst: &MaxLinSatInstance,
    noise: NoiseModel,
    l: usize,
) -> Result<Vec<Vec<Complex64>>> {
    build_abar_over(inst, noise, l, None)
}

fn build_abar_over(
    inst: &MaxLinSatInstance,
    noise: NoiseModel,
    l: usize,
    filter: Option<&SyndromeTable>,
) -> Result<Vec<Vec<Complex64>>> {
    let m = inst.num_constraints();
    let p = inst.modulus();
    let pf = p.get() as f64;
    check_weight_budget(m, p.get(), l)?;
    let g = build_g_table(inst);
    let entries = collect_entries(inst, &g, l, filter);
    let pairs = (entries.len() as u128).pow(2);
    if pairs > PAIR_ENUM_BUDGET {
        return Err(Error::BudgetExceeded {
            context: "error pair enumeration",
            needed: pairs,
            budget: PAIR_ENUM_BUDGET,
        });
    }

    // Group pair sums by the syndrome offset delta = synd(y2) - synd(y1).
    let size = l + 1;
    let mut grouped: HashMap<Vec<u32>, Vec<Complex64>> = HashMap::new();
    for e1 in &entries {
        for e2 in &entries {
            let delta: Vec<u32> = e2
                .syndrome
                .iter()
                .zip(&e1.syndrome)
                .map(|(&s2, &s1)| p.sub(s2, s1))
                .collect();
            let slot = grouped
                .entry(delta)
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); size * size]);
            slot[e1.weight * size + e2.weight] += e1.g_tilde.conj() * e2.g_tilde;
        }
    }

    let tau = tau_summary(inst.matrix(), noise);
    let r = inst.r() as f64;
    let mut abar = vec![Complex64::new(0.0, 0.0); size * size];
    if let Some(zero_group) = grouped.get(vec![0u32; inst.num_variables()].as_slice()) {
        for (slot, &value) in abar.iter_mut().zip(zero_group) {
            *slot += value * (m as f64 * r);
        }
    }
    let mut shifted = vec![0u32; inst.num_variables()];
    for i in 0..m {
        let row = inst.matrix().row(i);
        for a in 1..p.get() {
            for (slot, &bij) in shifted.iter_mut().zip(row) {
                *slot = p.mul(a, bij);
            }
            let Some(group) = grouped.get(shifted.as_slice()) else {
                continue;
            };
            let mut chi = Complex64::new(0.0, 0.0);
            for &v in &inst.constraint_sets()[i] {
                chi += p.root_of_unity(-(a as i64) * v as i64);
            }
            let coeff = chi * tau.tau_rows()[i];
            for (slot, &value) in abar.iter_mut().zip(group) {
                *slot += value * coeff;
            }
        }
    }

    let mut out = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for k1 in 0..size {
        for k2 in 0..size {
            let norm = (binomial_u128(m, k1) as f64 * binomial_u128(m, k2) as f64).sqrt();
            out[k1][k2] = abar[k1 * size + k2] / (pf * norm);
        }
    }
    Ok(out)
}

/// The correction matrix subtracted from the complete-set expectation when
/// the accepted-value sets are averaged uniformly: built from weighted
/// counts of single-coordinate-shift pairs that touch a misidentified
/// error. Tridiagonal; the diagonal carries (m r / p) gamma_k.
pub fn build_d_correction(
    inst: &MaxLinSatInstance,
    noise: NoiseModel,
    partition: &DecoderPartition,
) -> Result<Vec<Vec<f64>>> {
    let m = inst.num_constraints();
    let p = inst.modulus();
    let pf = p.get() as f64;
    let r = inst.r() as f64;
    let l = partition.max_weight();
    let tau = tau_summary(inst.matrix(), noise);
    let failed = partition.failed_set();

    // weighted[k1][k2] = sum over (i, a != 0) of tau_i |T^(i,a)_(k1,k2)|.
    let size = l + 1;
    let mut weighted = vec![0.0f64; size * size];
    let mut y1 = vec![0u32; m];
    for class in partition.classes() {
        for y2 in class.decoded.iter().chain(&class.failed) {
            let k2 = crate::fp::hamming_weight(y2);
            y1.copy_from_slice(y2.entries());
            let y2_failed = failed.contains(y2.entries());
            for i in 0..m {
                let original = y1[i];
                for a in 1..p.get() {
                    let replaced = p.sub(original, a);
                    y1[i] = replaced;
                    let k1 = k2 - usize::from(original != 0) + usize::from(replaced != 0);
                    if k1 <= l && (y2_failed || failed.contains(y1.as_slice())) {
                        weighted[k1 * size + k2] += tau.tau_rows()[i];
                    }
                }
                y1[i] = original;
            }
        }
    }

    let mut d = vec![vec![0.0f64; size]; size];
    for k in 0..size {
        d[k][k] = m as f64 * r / pf * partition.gamma(k);
        if p.get() > 2 {
            let coeff = (pf - 2.0 * r)
                / ((pf - 1.0).powi(k as i32) * (pf - 2.0))
                / (pf * binomial_u128(m, k) as f64);
            d[k][k] += coeff * weighted[k * size + k];
        }
        if k + 1 < size {
            let norm = (binomial_u128(m, k) as f64 * binomial_u128(m, k + 1) as f64).sqrt();
            let coeff = (r * (pf - r)).sqrt() / (pf - 1.0).powi((k + 1) as i32) / (pf * norm);
            d[k][k + 1] = coeff * weighted[k * size + k + 1];
            d[k + 1][k] = coeff * weighted[(k + 1) * size + k];
        }
    }
    Ok(d)
}

/// Operator norm of the gap between the correction matrix and its diagonal
/// part (m r / p) diag(gamma); bounded by tau_inf (m+1) gamma_max.
pub fn d_correction_offdiagonal_norm(
    inst: &MaxLinSatInstance,
    d: &[Vec<f64>],
    partition: &DecoderPartition,
) -> f64 {
    let m = inst.num_constraints() as f64;
    let r = inst.r() as f64;
    let p = inst.modulus().get() as f64;
    let size = d.len();
    let diag: Vec<f64> = (0..size)
        .map(|k| d[k][k] - m * r / p * partition.gamma(k))
        .collect();
    let offdiag: Vec<f64> = (0..size - 1).map(|k| d[k][k + 1]).collect();
    if size == 1 {
        return diag[0].abs();
    }
    let spec = crate::predictor::TridiagonalSpec::from_bands(diag, offdiag);
    let top = crate::predictor::largest_eigenvalue(&spec);
    let bottom = crate::predictor::smallest_eigenvalue(&spec);
    top.abs().max(bottom.abs())
}

/// How the accepted-value average in the lower-bound experiment is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsAverage {
    /// All 2^m right-hand-side choices.
    Exhaustive,
    /// Seeded uniform sample of right-hand sides.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Result of the lower-bound experiment: the measured average noisy score
/// over right-hand-side choices next to both penalty variants of the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundOutcome {
    pub measured_mean: f64,
    pub std_err: Option<f64>,
    pub bound_linear: f64,
    pub bound_squared: f64,
    pub gamma_max: f64,
}

/// Averages the imperfect-decoder noisy score over parity right-hand sides
/// (p = 2, r = 1) and evaluates the closed-form lower bound for the same
/// coefficients, noise and failure rates.
pub fn lower_bound_experiment(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
    noise: NoiseModel,
    table: &SyndromeTable,
    partition: &DecoderPartition,
    average: RhsAverage,
) -> Result<LowerBoundOutcome> {
    if inst.modulus().get() != 2 || inst.r() != 1 {
        return Err(Error::InvalidParameter(
            "the experiment applies to p = 2, r = 1 instances only".into(),
        ));
    }
    let m = inst.num_constraints();
    let score_for = |rhs: &[u32]| -> Result<f64> {
        let sets = rhs.iter().map(|&v| vec![v]).collect();
        let trial = inst.with_sets(sets)?;
        expected_score_imperfect(&trial, coeffs, noise, table)
    };

    let (measured_mean, std_err) = match average {
        RhsAverage::Exhaustive => {
            if m >= 24 {
                return Err(Error::BudgetExceeded {
                    context: "exhaustive right-hand-side average",
                    needed: 1u128 << m,
                    budget: 1u128 << 24,
                });
            }
            let mut acc = KahanSum::default();
            let total = 1usize << m;
            let mut rhs = vec![0u32; m];
            for bits in 0..total {
                for (j, slot) in rhs.iter_mut().enumerate() {
                    *slot = ((bits >> j) & 1) as u32;
                }
                acc.add(score_for(&rhs)?);
            }
            (acc.value() / total as f64, None)
        }
        RhsAverage::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidParameter("no samples requested".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut acc = KahanSum::default();
            let mut acc_sq = KahanSum::default();
            let mut rhs = vec![0u32; m];
            for _ in 0..samples {
                for slot in rhs.iter_mut() {
                    *slot = rng.random_range(0..2u32);
                }
                let s = score_for(&rhs)?;
                acc.add(s);
                acc_sq.add(s * s);
            }
            let mean = acc.value() / samples as f64;
            let variance = (acc_sq.value() / samples as f64 - mean * mean).max(0.0);
            (mean, Some((variance / samples as f64).sqrt()))
        }
    };

    let gamma_max = partition.gamma_max();
    Ok(LowerBoundOutcome {
        measured_mean,
        std_err,
        bound_linear: parity_lower_bound(inst, coeffs, noise, gamma_max, PenaltyExponent::Linear)?,
        bound_squared: parity_lower_bound(
            inst,
            coeffs,
            noise,
            gamma_max,
            PenaltyExponent::Squared,
        )?,
        gamma_max,
    })
}

/// Convenience: a decoder whose failure rates are all zero gives back the
/// ideal state; exposed for tests and the verification harness.
pub fn perfect_state_matches(inst: &MaxLinSatInstance, coeffs: &DqiCoefficients) -> Result<f64> {
    let (table, _) = build_decoder(inst, coeffs.degree(), &DecoderPolicy::MinWeight)?;
    let imperfect = build_imperfect_state(inst, coeffs, &table)?;
    let ideal = build_dqi_state(inst, coeffs)?;
    Ok(imperfect
        .amps()
        .iter()
        .zip(ideal.amps())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}
