//! Closed-form performance predictions.
//!
//! The central object is the (l+1) x (l+1) symmetric tridiagonal coefficient
//! matrix with zero-started diagonal (0, d, 2d, ..., ld) and off-diagonal
//! entries a_k = sqrt(k(m-k+1)). Its principal eigenpair yields the optimal
//! degree weighting and the noiseless performance excess; the noisy value
//! scales that excess by the noise-weighted sparsity tau_1.

use num_complex::Complex64;

use crate::accum::KahanSum;
use crate::error::{Error, Result};
use crate::fp::DistanceCheck;
use crate::instance::MaxLinSatInstance;
use crate::noise::{tau_summary, NoiseModel, SparsitySummary};
use crate::state::DqiCoefficients;

/// Symmetric tridiagonal coefficient matrix of size l+1.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSpec {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    d: f64,
}

impl TridiagonalSpec {
    /// Wraps raw bands; used for spectra of derived tridiagonal matrices.
    pub fn from_bands(diag: Vec<f64>, offdiag: Vec<f64>) -> Self {
        assert_eq!(offdiag.len() + 1, diag.len(), "band lengths");
        Self {
            diag,
            offdiag,
            d: 0.0,
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    #[inline]
    pub fn off_diagonal(&self) -> &[f64] {
        &self.offdiag
    }

    #[inline]
    pub fn d(&self) -> f64 {
        self.d
    }

    /// An upper bound on the spectral radius (Gershgorin).
    pub fn norm_bound(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|i| {
                let left = if i > 0 {
                    self.offdiag[i - 1].abs()
                } else {
                    0.0
                };
                let right = if i + 1 < n {
                    self.offdiag[i].abs()
                } else {
                    0.0
                };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// w^dagger A w, exact-real for any complex w.
    pub fn quadratic_form(&self, w: &[Complex64]) -> f64 {
        let mut acc = KahanSum::default();
        for (k, &dk) in self.diag.iter().enumerate() {
            acc.add(dk * w[k].norm_sqr());
        }
        for (k, &ak) in self.offdiag.iter().enumerate() {
            acc.add(2.0 * ak * (w[k].conj() * w[k + 1]).re);
        }
        acc.value()
    }
}

/// Diagonal slope d = (p - 2r) / sqrt(r(p - r)).
pub fn coupling_d(p: u64, r: usize) -> f64 {
    let (p, r) = (p as f64, r as f64);
    (p - 2.0 * r) / (r * (p - r)).sqrt()
}

/// Builds the tridiagonal coefficient matrix for m constraints, degree l and
/// diagonal slope d.
pub fn build_a(m: usize, l: usize, d: f64) -> Result<TridiagonalSpec> {
    if l > m {
        return Err(Error::InvalidParameter(format!(
            "degree l = {l} exceeds the constraint count m = {m}"
        )));
    }
    let diag = (0..=l).map(|k| k as f64 * d).collect();
    let offdiag = (1..=l)
        .map(|k| (k as f64 * (m - k + 1) as f64).sqrt())
        .collect();
    Ok(TridiagonalSpec { diag, offdiag, d })
}

/// Number of eigenvalues strictly below `shift`, by the Sturm sequence of
/// the shifted LDL^T factorization.
fn sturm_count(spec: &TridiagonalSpec, shift: f64) -> usize {
    let n = spec.size();
    let guard = 1e-300;
    let mut count = 0;
    let mut q = spec.diag[0] - shift;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let safe = if q.abs() < guard {
            if q >= 0.0 {
                guard
            } else {
                -guard
            }
        } else {
            q
        };
        q = (spec.diag[i] - shift) - spec.offdiag[i - 1] * spec.offdiag[i - 1] / safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue by Sturm bisection, resolved to machine precision
/// relative to the Gershgorin bound.
pub fn largest_eigenvalue(spec: &TridiagonalSpec) -> f64 {
    let n = spec.size();
    if n == 1 {
        return spec.diag[0];
    }
    let bound = spec.norm_bound() + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    let scale = bound.max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) < 4.0 * f64::EPSILON * scale {
            break;
        }
        if sturm_count(spec, mid) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest eigenvalue by the same bisection, from the other end.
pub fn smallest_eigenvalue(spec: &TridiagonalSpec) -> f64 {
    let n = spec.size();
    if n == 1 {
        return spec.diag[0];
    }
    let bound = spec.norm_bound() + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    let scale = bound.max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) < 4.0 * f64::EPSILON * scale {
            break;
        }
        if sturm_count(spec, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves (A - shift I) x = b for tridiagonal A by LU with partial
/// pivoting; tolerant of the near-singular shifts used by inverse iteration.
///
/// The working row at step i holds at most three entries (columns i..i+2);
/// pivot swaps push a second upper band into the stored U factor.
fn solve_shifted(spec: &TridiagonalSpec, shift: f64, b: &[f64]) -> Vec<f64> {
    let n = spec.size();
    let tiny = 1e-300;
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut rhs = b.to_vec();

    let mut row = (
        spec.diag[0] - shift,
        if n > 1 { spec.offdiag[0] } else { 0.0 },
        0.0,
    );
    for i in 0..n - 1 {
        let next = (
            spec.offdiag[i],
            spec.diag[i + 1] - shift,
            if i + 1 < n - 1 {
                spec.offdiag[i + 1]
            } else {
                0.0
            },
        );
        if next.0.abs() > row.0.abs() {
            u[i] = next.0;
            v[i] = next.1;
            w[i] = next.2;
            rhs.swap(i, i + 1);
            let factor = row.0 / next.0;
            rhs[i + 1] -= factor * rhs[i];
            row = (row.1 - factor * next.1, row.2 - factor * next.2, 0.0);
        } else {
            let pivot = if row.0 == 0.0 { tiny } else { row.0 };
            u[i] = pivot;
            v[i] = row.1;
            w[i] = row.2;
            let factor = next.0 / pivot;
            rhs[i + 1] -= factor * rhs[i];
            row = (next.1 - factor * row.1, next.2 - factor * row.2, 0.0);
        }
    }
    u[n - 1] = if row.0 == 0.0 { tiny } else { row.0 };

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        if i + 1 < n {
            acc -= v[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= w[i] * x[i + 2];
        }
        x[i] = acc / u[i];
    }
    x
}

/// Principal eigenpair: the largest eigenvalue and a unit eigenvector whose
/// first nonzero component is positive.
pub fn principal_eigenpair(spec: &TridiagonalSpec) -> (f64, Vec<f64>) {
    let n = spec.size();
    if n == 1 {
        return (spec.diag[0], vec![1.0]);
    }
    let lambda = largest_eigenvalue(spec);
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..4 {
        let mut next = solve_shifted(spec, lambda, &v);
        // The solve is nearly singular on purpose; rescale by the largest
        // component before forming the norm so squares cannot overflow.
        let peak = next.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if !peak.is_finite() || peak == 0.0 {
            break;
        }
        for x in &mut next {
            *x /= peak;
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut next {
            *x /= norm;
        }
        v = next;
    }
    // Sign convention: first nonzero component positive (v is unit norm).
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
    }
    (lambda, v)
}

/// Principal eigenvector packaged as unit-norm degree coefficients.
pub fn principal_coefficients(m: usize, l: usize, d: f64) -> Result<(f64, DqiCoefficients)> {
    let spec = build_a(m, l, d)?;
    let (lambda, v) = principal_eigenpair(&spec);
    Ok((lambda, DqiCoefficients::from_real(&v)?))
}

/// Establishes 2l+1 < d_perp, preferring an analytically known dual
/// distance over kernel enumeration.
pub fn verify_distance_condition(inst: &MaxLinSatInstance, l: usize) -> Result<()> {
    verify_distance_condition_with_budget(inst, l, crate::fp::DISTANCE_ENUM_BUDGET)
}

/// [`verify_distance_condition`] with an explicit candidate cap; budget
/// exhaustion is an error, never a silent pass.
pub fn verify_distance_condition_with_budget(
    inst: &MaxLinSatInstance,
    l: usize,
    budget: u128,
) -> Result<()> {
    if let Some(d_perp) = inst.dual_distance() {
        if 2 * l + 1 < d_perp {
            return Ok(());
        }
        return Err(Error::DistanceCondition(format!(
            "2l+1 = {} >= known d_perp = {d_perp}",
            2 * l + 1
        )));
    }
    match crate::fp::check_distance_condition_with_budget(inst.matrix(), l, budget) {
        DistanceCheck::Holds => Ok(()),
        DistanceCheck::Violated { witness } => Err(Error::DistanceCondition(format!(
            "kernel vector of weight {} found",
            crate::fp::hamming_weight(&witness)
        ))),
        DistanceCheck::Undecided { examined } => Err(Error::DistanceCondition(format!(
            "enumeration budget exhausted after {examined} candidates"
        ))),
    }
}

/// Exact noisy expectation in closed form, valid under the distance
/// condition: m r / p + tau_1 sqrt(r(p-r))/p w^dagger A w for unit w.
pub fn expected_score_closed_form(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
    noise: NoiseModel,
) -> Result<f64> {
    expected_score_with_damping(inst, coeffs, &tau_summary(inst.matrix(), noise))
}

/// The per-row damping hook behind [`expected_score_closed_form`]: any factor
/// vector can replace the depolarizing (1-eps)^|b_i|.
pub fn expected_score_with_damping(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
    damping: &SparsitySummary,
) -> Result<f64> {
    if !coeffs.is_unit(1e-9) {
        return Err(Error::NotNormalized {
            deviation: (coeffs.norm_sq() - 1.0).abs(),
        });
    }
    if damping.tau_rows().len() != inst.num_constraints() {
        return Err(Error::DimensionMismatch {
            context: "row damping factors",
            expected: inst.num_constraints(),
            got: damping.tau_rows().len(),
        });
    }
    verify_distance_condition(inst, coeffs.degree())?;
    let m = inst.num_constraints();
    let p = inst.modulus().get() as f64;
    let r = inst.r() as f64;
    let spec = build_a(
        m,
        coeffs.degree(),
        coupling_d(inst.modulus().get() as u64, inst.r()),
    )?;
    let excess = (r * (p - r)).sqrt() / p * spec.quadratic_form(coeffs.weights());
    Ok(m as f64 * r / p + damping.tau1() * excess)
}

/// Bracket on the noisy expectation when every row degree lies in
/// [l1, l2]: mr/p + (1-eps)^l2 X <= value <= mr/p + (1-eps)^l1 X with
/// X the noiseless excess.
pub fn score_bounds_sparsity(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
    noise: NoiseModel,
    l1: usize,
    l2: usize,
) -> Result<(f64, f64)> {
    if !coeffs.is_unit(1e-9) {
        return Err(Error::NotNormalized {
            deviation: (coeffs.norm_sq() - 1.0).abs(),
        });
    }
    let degrees = inst.matrix().row_degrees();
    if let Some(&bad) = degrees.iter().find(|&&deg| deg < l1 || deg > l2) {
        return Err(Error::InvalidParameter(format!(
            "row degree {bad} outside the window [{l1}, {l2}]"
        )));
    }
    let m = inst.num_constraints();
    let p = inst.modulus().get() as f64;
    let r = inst.r() as f64;
    let spec = build_a(
        m,
        coeffs.degree(),
        coupling_d(inst.modulus().get() as u64, inst.r()),
    )?;
    let excess = (r * (p - r)).sqrt() / p * spec.quadratic_form(coeffs.weights());
    let base = m as f64 * r / p;
    let keep = 1.0 - noise.epsilon();
    Ok((
        base + keep.powi(l2 as i32) * excess,
        base + keep.powi(l1 as i32) * excess,
    ))
}

/// Large-size limit of lambda_max / m at fixed degree fraction mu = l/m:
/// mu d + 2 sqrt(mu(1-mu)).
pub fn asymptotic_lambda(mu: f64, d: f64) -> Result<f64> {
    if !(mu > 0.0 && mu <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "degree fraction mu = {mu} outside (0, 1/2]"
        )));
    }
    let floor = -(1.0 - 2.0 * mu) / (mu * (1.0 - mu)).sqrt();
    if d < floor {
        return Err(Error::InvalidParameter(format!(
            "diagonal slope d = {d} below the admissible floor {floor}"
        )));
    }
    Ok(mu * d + 2.0 * (mu * (1.0 - mu)).sqrt())
}

/// Large-size limit of the optimal expected satisfied fraction:
/// r/p + tau_1 (mu - 2 mu r/p + 2 sqrt((r/p)(1 - r/p)) sqrt(mu(1-mu))),
/// valid for mu >= 1 - r/p.
pub fn asymptotic_optimal_score(mu: f64, r_over_p: f64, tau1: f64) -> Result<f64> {
    if !(0.0 < r_over_p && r_over_p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "satisfying fraction r/p = {r_over_p} outside (0, 1)"
        )));
    }
    if mu < 1.0 - r_over_p {
        return Err(Error::InvalidParameter(format!(
            "degree fraction mu = {mu} below the hypothesis floor {}",
            1.0 - r_over_p
        )));
    }
    if !(0.0..=1.0).contains(&tau1) {
        return Err(Error::InvalidParameter(format!(
            "sparsity factor tau1 = {tau1} outside [0, 1]"
        )));
    }
    let cross = 2.0 * (r_over_p * (1.0 - r_over_p)).sqrt() * (mu * (1.0 - mu)).sqrt();
    Ok(r_over_p + tau1 * (mu - 2.0 * mu * r_over_p + cross))
}

/// Which exponent the decoder-failure penalty carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyExponent {
    /// Penalty tau_inf (m+1) gamma_max / (1 - gamma_max).
    Linear,
    /// Conservative variant with (m+1)^2; the default.
    #[default]
    Squared,
}

/// Lower bound on the rhs-averaged noisy expectation for parity instances
/// (p = 2, r = 1) with an imperfect decoder of failure rate gamma_max:
/// m/2 + (tau_1/2) w^dagger A w / |w|^2 - penalty.
pub fn parity_lower_bound(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
    noise: NoiseModel,
    gamma_max: f64,
    exponent: PenaltyExponent,
) -> Result<f64> {
    if inst.modulus().get() != 2 || inst.r() != 1 {
        return Err(Error::InvalidParameter(
            "the lower bound applies to p = 2, r = 1 instances only".into(),
        ));
    }
    if !(0.0..1.0).contains(&gamma_max) {
        return Err(Error::InvalidParameter(format!(
            "gamma_max = {gamma_max} outside [0, 1)"
        )));
    }
    let m = inst.num_constraints();
    let spec = build_a(m, coeffs.degree(), 0.0)?;
    let quad = spec.quadratic_form(coeffs.weights()) / coeffs.norm_sq();
    let tau = tau_summary(inst.matrix(), noise);
    let factor = match exponent {
        PenaltyExponent::Linear => (m + 1) as f64,
        PenaltyExponent::Squared => ((m + 1) as f64).powi(2),
    };
    let penalty = tau.tau_inf() * factor * gamma_max / (1.0 - gamma_max);
    Ok(m as f64 / 2.0 + 0.5 * tau.tau1() * quad - penalty)
}

/// Mean of the per-row damping factors, usable with
/// [`expected_score_with_damping`] sweeps.
pub fn tau1_of(inst: &MaxLinSatInstance, noise: NoiseModel) -> f64 {
    tau_summary(inst.matrix(), noise).tau1()
}
