//! Local depolarizing noise and the exact noisy output semantics.
//!
//! For a computational-basis measurement, per-qudit depolarizing noise at
//! rate epsilon acts classically on the output distribution: each symbol is
//! independently replaced by a uniform one with probability epsilon. The
//! distribution transform below applies that reduction one axis at a time;
//! the tiny density-matrix route in [`crate::oracles`] exists to validate
//! the equivalence independently.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::accum::{kahan_sum, KahanSum};
use crate::error::{Error, Result};
use crate::fp::{FpMatrix, FpVector};
use crate::instance::MaxLinSatInstance;
use crate::state::{for_each_assignment, AmplitudeVector};

/// Depolarizing rate container; epsilon in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    epsilon: f64,
}

impl NoiseModel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "depolarizing rate {epsilon} outside [0, 1]"
            )));
        }
        Ok(Self { epsilon })
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub const NOISELESS: NoiseModel = NoiseModel { epsilon: 0.0 };
}

/// Per-row noise survival factors tau_i = (1-eps)^(row degree), their mean
/// tau_1 (the noise-weighted sparsity) and their maximum tau_inf.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsitySummary {
    tau_rows: Vec<f64>,
    tau1: f64,
    tau_inf: f64,
}

impl SparsitySummary {
    /// Builds a summary from externally supplied per-row damping factors.
    /// This is the hook for noise channels beyond global depolarizing: any
    /// factor vector in [0, 1]^m can stand in for (1-eps)^|b_i|.
    pub fn from_row_factors(tau_rows: Vec<f64>) -> Result<Self> {
        if tau_rows.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one row factor required".into(),
            ));
        }
        if tau_rows.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
            return Err(Error::InvalidParameter(
                "row damping factors must lie in [0, 1]".into(),
            ));
        }
        let tau1 = kahan_sum(tau_rows.iter().copied()) / tau_rows.len() as f64;
        let tau_inf = tau_rows.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            tau_rows,
            tau1,
            tau_inf,
        })
    }

    #[inline]
    pub fn tau_rows(&self) -> &[f64] {
        &self.tau_rows
    }

    #[inline]
    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    #[inline]
    pub fn tau_inf(&self) -> f64 {
        self.tau_inf
    }
}

/// Computes tau(B, eps, i) = (1-eps)^|b_i| for every row, with the mean and
/// maximum.
pub fn tau_summary(matrix: &FpMatrix, noise: NoiseModel) -> SparsitySummary {
    let keep = 1.0 - noise.epsilon();
    let tau_rows: Vec<f64> = matrix
        .row_degrees()
        .into_iter()
        .map(|deg| keep.powi(deg as i32))
        .collect();
    SparsitySummary::from_row_factors(tau_rows).expect("factors in range by construction")
}

fn require_normalized(state: &AmplitudeVector) -> Result<()> {
    let deviation = (state.norm_sq().sqrt() - 1.0).abs();
    if deviation > 1e-6 {
        return Err(Error::NotNormalized { deviation });
    }
    Ok(())
}

/// Measurement distribution of the noisy state: q(z) mixes the ideal
/// distribution |amp|^2 with per-axis uniform replacement at rate epsilon.
/// The input must be normalized; the output sums to 1 up to rounding.
pub fn noisy_output_distribution(state: &AmplitudeVector, noise: NoiseModel) -> Result<Vec<f64>> {
    require_normalized(state)?;
    let mut q: Vec<f64> = state.amps().iter().map(|a| a.norm_sqr()).collect();
    let axes: Vec<usize> = (0..state.num_qudits()).collect();
    mix_axes(&mut q, state, noise, &axes);
    Ok(q)
}

/// Applies the single-axis replacement channel for each listed axis:
/// q <- (1-eps) q + (eps/p) (marginal over that axis, broadcast back).
/// The axis order is immaterial; tests assert it.
pub(crate) fn mix_axes(q: &mut [f64], state: &AmplitudeVector, noise: NoiseModel, axes: &[usize]) {
    let eps = noise.epsilon();
    if eps == 0.0 {
        return;
    }
    let p = state.modulus().get() as usize;
    let n = state.num_qudits();
    let keep = 1.0 - eps;
    let fill = eps / p as f64;
    for &axis in axes {
        let stride = p.pow((n - 1 - axis) as u32);
        let block = stride * p;
        for hi in 0..q.len() / block {
            for lo in 0..stride {
                let base = hi * block + lo;
                let mut marginal = KahanSum::default();
                for v in 0..p {
                    marginal.add(q[base + v * stride]);
                }
                let add = fill * marginal.value();
                for v in 0..p {
                    let slot = base + v * stride;
                    q[slot] = keep * q[slot] + add;
                }
            }
        }
    }
}

/// Monte-Carlo counterpart of [`noisy_output_distribution`]: draw an
/// assignment from |amp|^2, then independently replace each coordinate by a
/// uniform symbol with probability epsilon. Deterministic per seed.
pub fn noisy_sampler(
    state: &AmplitudeVector,
    noise: NoiseModel,
    seed: u64,
    shots: usize,
) -> Result<Vec<FpVector>> {
    require_normalized(state)?;
    let p = state.modulus().get();
    let eps = noise.epsilon();
    let mut cdf = Vec::with_capacity(state.len());
    let mut acc = KahanSum::default();
    for a in state.amps() {
        acc.add(a.norm_sqr());
        cdf.push(acc.value());
    }
    let total = acc.value();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(shots);
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(state.len() - 1);
        let mut digits = state.digits_of(idx);
        for digit in &mut digits {
            if eps > 0.0 && rng.random::<f64>() < eps {
                *digit = rng.random_range(0..p);
            }
        }
        out.push(FpVector::new(state.modulus(), digits).expect("digits in range"));
    }
    Ok(out)
}

/// Exact expected number of satisfied constraints of the noisy measurement:
/// sum_z q(z) s(z).
pub fn expected_score_exact(
    inst: &MaxLinSatInstance,
    state: &AmplitudeVector,
    noise: NoiseModel,
) -> Result<f64> {
    if state.num_qudits() != inst.num_variables() || state.modulus() != inst.modulus() {
        return Err(Error::DimensionMismatch {
            context: "state vs instance",
            expected: inst.num_variables(),
            got: state.num_qudits(),
        });
    }
    let q = noisy_output_distribution(state, noise)?;
    let masks = inst.membership_masks();
    let mut acc = KahanSum::default();
    for_each_assignment(inst.matrix(), &mut |idx, values| {
        let score = values
            .iter()
            .zip(&masks)
            .filter(|(&v, mask)| mask[v as usize])
            .count();
        acc.add(q[idx] * score as f64);
    });
    Ok(acc.value())
}

/// Mean and standard error of the instance score over a batch of samples.
pub fn sample_score_stats(inst: &MaxLinSatInstance, samples: &[FpVector]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let mut sum = KahanSum::default();
    let mut sum_sq = KahanSum::default();
    for x in samples {
        let s = inst.score(x)? as f64;
        sum.add(s);
        sum_sq.add(s * s);
    }
    let count = samples.len() as f64;
    let mean = sum.value() / count;
    let variance = (sum_sq.value() / count - mean * mean).max(0.0);
    let std_err = (variance / count).sqrt();
    Ok((mean, std_err))
}
