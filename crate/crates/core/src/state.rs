//! Exact construction of the interference state and its Fourier transform.
//!
//! The state lives on F_p^n and is stored densely: index(x) = sum_j x_j
//! p^(n-1-j), i.e. x_1 is the most significant digit. Amplitudes are built
//! from the centered constraint indicators g_i through elementary symmetric
//! polynomials, evaluated by a dynamic program over constraints.

use std::collections::HashMap;
use std::io::{Read, Write};

use num_complex::Complex64;

use crate::accum::kahan_sum;
use crate::error::{Error, Result};
use crate::fp::{
    binomial_u128, for_each_weight_k_vector, weight_class_size, FpMatrix, PrimeModulus,
};
use crate::instance::MaxLinSatInstance;

/// Cap on dense amplitude vectors (number of entries).
pub const MAX_STATE_ENTRIES: u128 = 1 << 24;

/// Cap on weight-limited error enumeration (Gram matrix, syndrome tables).
pub const ERROR_ENUM_BUDGET: u128 = 20_000_000;

const DUMP_MAGIC: &[u8; 8] = b"DQISTATE";

/// Centered, normalized constraint indicator tables.
///
/// g_i(x) = (f_i(x) - f_bar) / phi with f_i = +-1 membership of the i-th
/// accepted set; g_tilde is its discrete Fourier transform on F_p. Each
/// table satisfies sum_x g_i(x)^2 = sum_y |g_tilde_i(y)|^2 = 1 and
/// g_tilde_i(0) = 0.
#[derive(Debug, Clone)]
pub struct GTable {
    modulus: PrimeModulus,
    f_bar: f64,
    phi: f64,
    g: Vec<Vec<f64>>,
    g_tilde: Vec<Vec<Complex64>>,
}

impl GTable {
    #[inline]
    pub fn f_bar(&self) -> f64 {
        self.f_bar
    }

    #[inline]
    pub fn phi(&self) -> f64 {
        self.phi
    }

    #[inline]
    pub fn g(&self, constraint: usize, value: u32) -> f64 {
        self.g[constraint][value as usize]
    }

    #[inline]
    pub fn g_tilde(&self, constraint: usize, value: u32) -> Complex64 {
        self.g_tilde[constraint][value as usize]
    }

    /// Product of g_tilde_i(y_i) over the support of y; the empty product
    /// (y = 0) is 1.
    pub fn g_tilde_product(&self, y: &[u32]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0 {
                acc *= self.g_tilde(i, yi);
            }
        }
        acc
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }
}

/// Builds the g/g_tilde tables of an instance. With |F_i| = r for all i the
/// mean is f_bar = 2r/p - 1 and the normalizer phi = sqrt(4r(1 - r/p)).
pub fn build_g_table(inst: &MaxLinSatInstance) -> GTable {
    let modulus = inst.modulus();
    let p = modulus.get();
    let r = inst.r() as f64;
    let pf = p as f64;
    let f_bar = 2.0 * r / pf - 1.0;
    let phi = (4.0 * r * (1.0 - r / pf)).sqrt();
    let masks = inst.membership_masks();
    let g: Vec<Vec<f64>> = masks
        .iter()
        .map(|mask| {
            (0..p as usize)
                .map(|x| {
                    let f = if mask[x] { 1.0 } else { -1.0 };
                    (f - f_bar) / phi
                })
                .collect()
        })
        .collect();
    let scale = 1.0 / pf.sqrt();
    let g_tilde = g
        .iter()
        .map(|row| {
            (0..p)
                .map(|y| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (x, &gx) in row.iter().enumerate() {
                        acc += modulus.root_of_unity(y as i64 * x as i64) * gx;
                    }
                    acc * scale
                })
                .collect()
        })
        .collect();
    GTable {
        modulus,
        f_bar,
        phi,
        g,
        g_tilde,
    }
}

/// Coefficients w_0..w_l attached to the per-degree components of the state.
#[derive(Debug, Clone, PartialEq)]
pub struct DqiCoefficients {
    w: Vec<Complex64>,
}

impl DqiCoefficients {
    pub fn new(w: Vec<Complex64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidParameter(
                "coefficient vector must be nonempty".into(),
            ));
        }
        Ok(Self { w })
    }

    pub fn from_real(w: &[f64]) -> Result<Self> {
        Self::new(w.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Degree l (one less than the coefficient count).
    #[inline]
    pub fn degree(&self) -> usize {
        self.w.len() - 1
    }

    #[inline]
    pub fn weights(&self) -> &[Complex64] {
        &self.w
    }

    pub fn norm_sq(&self) -> f64 {
        kahan_sum(self.w.iter().map(|c| c.norm_sqr()))
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sq().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            w: self.w.iter().map(|c| c / norm).collect(),
        })
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm_sq() - 1.0).abs() <= tol
    }
}

/// Dense complex amplitudes over F_p^n.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    modulus: PrimeModulus,
    n: usize,
    amps: Vec<Complex64>,
}

impl AmplitudeVector {
    pub fn zeros(modulus: PrimeModulus, n: usize) -> Result<Self> {
        let len = state_len(modulus, n)?;
        Ok(Self {
            modulus,
            n,
            amps: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    pub fn new(modulus: PrimeModulus, n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let len = state_len(modulus, n)?;
        if amps.len() != len {
            return Err(Error::DimensionMismatch {
                context: "amplitude vector",
                expected: len,
                got: amps.len(),
            });
        }
        Ok(Self { modulus, n, amps })
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn num_qudits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    #[inline]
    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Flat index of the assignment (x_1, ..., x_n); x_1 most significant.
    pub fn index_of(&self, x: &[u32]) -> usize {
        let p = self.modulus.get() as usize;
        x.iter().fold(0, |acc, &d| acc * p + d as usize)
    }

    /// Digits of a flat index, most significant first.
    pub fn digits_of(&self, mut idx: usize) -> Vec<u32> {
        let p = self.modulus.get() as usize;
        let mut digits = vec![0u32; self.n];
        for slot in (0..self.n).rev() {
            digits[slot] = (idx % p) as u32;
            idx /= p;
        }
        digits
    }

    pub fn norm_sq(&self) -> f64 {
        kahan_sum(self.amps.iter().map(|a| a.norm_sqr()))
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sq().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            modulus: self.modulus,
            n: self.n,
            amps: self.amps.iter().map(|a| a / norm).collect(),
        })
    }

    /// Writes the binary dump: an 8-byte magic, p and n as little-endian
    /// u32, then (re, im) little-endian f64 pairs in index order.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&self.modulus.get().to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the binary dump format written by [`Self::write_binary`].
    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..8] != DUMP_MAGIC {
            return Err(Error::InvalidParameter("bad state dump magic".into()));
        }
        let p = u32::from_le_bytes(header[8..12].try_into().unwrap());
        let n = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let modulus = PrimeModulus::new(p as u64)?;
        let len = state_len(modulus, n)?;
        let mut amps = Vec::with_capacity(len);
        let mut buf = [0u8; 16];
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            amps.push(Complex64::new(
                f64::from_le_bytes(buf[..8].try_into().unwrap()),
                f64::from_le_bytes(buf[8..].try_into().unwrap()),
            ));
        }
        Self::new(modulus, n, amps)
    }
}

pub(crate) fn state_len(modulus: PrimeModulus, n: usize) -> Result<usize> {
    let total = (modulus.get() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if total > MAX_STATE_ENTRIES {
        return Err(Error::BudgetExceeded {
            context: "dense amplitude vector",
            needed: total,
            budget: MAX_STATE_ENTRIES,
        });
    }
    Ok(total as usize)
}

/// Walks every assignment x in index order, keeping the constraint values
/// (Bx)_i updated incrementally: each digit step adds one matrix column.
pub(crate) fn for_each_assignment(matrix: &FpMatrix, f: &mut impl FnMut(usize, &[u32])) {
    let p = matrix.modulus();
    let (m, n) = (matrix.rows(), matrix.cols());
    let columns: Vec<Vec<u32>> = (0..n)
        .map(|j| (0..m).map(|i| matrix.row(i)[j]).collect())
        .collect();
    let total = (p.get() as usize).pow(n as u32);
    let mut digits = vec![0u32; n];
    let mut values = vec![0u32; m];
    f(0, &values);
    for idx in 1..total {
        let mut j = n - 1;
        loop {
            let wrapped = digits[j] + 1 == p.get();
            digits[j] = if wrapped { 0 } else { digits[j] + 1 };
            // Both a wrap (p-1 -> 0) and a plain increment shift the digit
            // by +1 mod p, so each touched position adds its column once.
            for (vi, ci) in values.iter_mut().zip(&columns[j]) {
                *vi = p.add(*vi, *ci);
            }
            if !wrapped {
                break;
            }
            j -= 1;
        }
        f(idx, &values);
    }
}

/// Values of the degree-k symmetric constraint polynomials for every
/// assignment, k = 0..=l, flattened with stride l+1 (index x major).
///
/// Entry k is k! e_k(g_1(b_1 x), ..., g_m(b_m x)) where e_k is the
/// elementary symmetric polynomial, evaluated by the stable recurrence
/// e_k <- e_k + g_i e_{k-1} over constraints.
pub fn symmetric_poly_values(inst: &MaxLinSatInstance, g: &GTable, l: usize) -> Result<Vec<f64>> {
    let m = inst.num_constraints();
    if l > m {
        return Err(Error::InvalidParameter(format!(
            "degree l = {l} exceeds the constraint count m = {m}"
        )));
    }
    let len = state_len(inst.modulus(), inst.num_variables())?;
    let mut out = vec![0.0; len * (l + 1)];
    let factorials = factorials(l);
    let mut scratch = vec![0.0; l + 1];
    for_each_assignment(inst.matrix(), &mut |idx, values| {
        elementary_symmetric(g, values, &mut scratch);
        let base = idx * (l + 1);
        for k in 0..=l {
            out[base + k] = scratch[k] * factorials[k];
        }
    });
    Ok(out)
}

fn factorials(l: usize) -> Vec<f64> {
    let mut f = vec![1.0; l + 1];
    for k in 1..=l {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

/// e_0..e_l of the per-constraint g values, written into `out`.
fn elementary_symmetric(g: &GTable, values: &[u32], out: &mut [f64]) {
    out.fill(0.0);
    out[0] = 1.0;
    let l = out.len() - 1;
    for (i, &v) in values.iter().enumerate() {
        let gi = g.g(i, v);
        let top = l.min(i + 1);
        for k in (1..=top).rev() {
            out[k] += gi * out[k - 1];
        }
    }
}

/// Builds the interference state: amplitude(x) = sum_k w_k e_k(x) /
/// sqrt(p^(n-k) C(m,k)), with e_k the elementary symmetric polynomial of
/// the per-constraint g values.
///
/// The unordered polynomial is the one that makes each degree component a
/// unit vector under the distance condition (its Fourier side carries one
/// g_tilde product per weight-k error); the ordered-tuple variant of
/// [`symmetric_poly_values`] differs by k!.
pub fn build_dqi_state(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
) -> Result<AmplitudeVector> {
    let m = inst.num_constraints();
    let l = coeffs.degree();
    if l > m {
        return Err(Error::InvalidParameter(format!(
            "degree l = {l} exceeds the constraint count m = {m}"
        )));
    }
    let n = inst.num_variables();
    let g = build_g_table(inst);
    let mut state = AmplitudeVector::zeros(inst.modulus(), n)?;
    let p = inst.modulus().get() as f64;
    let scaled: Vec<Complex64> = coeffs
        .weights()
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let norm = (p.powi(n as i32 - k as i32) * binomial_u128(m, k) as f64).sqrt();
            w / norm
        })
        .collect();
    let mut scratch = vec![0.0; l + 1];
    let amps = state.amps_mut();
    for_each_assignment(inst.matrix(), &mut |idx, values| {
        elementary_symmetric(&g, values, &mut scratch);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=l {
            acc += scaled[k] * scratch[k];
        }
        amps[idx] = acc;
    });
    Ok(state)
}

/// Which way to apply the qudit-wise Fourier transform with matrix entries
/// omega_p^(jk) / sqrt(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierDirection {
    Forward,
    Inverse,
}

/// Applies the n-fold Fourier transform as n sequential dense p x p axis
/// transforms. Forward then Inverse is the identity.
pub fn fourier_state(state: &AmplitudeVector, direction: FourierDirection) -> AmplitudeVector {
    let modulus = state.modulus();
    let p = modulus.get() as usize;
    let n = state.num_qudits();
    let scale = 1.0 / (p as f64).sqrt();
    let sign = match direction {
        FourierDirection::Forward => 1i64,
        FourierDirection::Inverse => -1i64,
    };
    let mut phases = vec![Complex64::new(0.0, 0.0); p * p];
    for u in 0..p {
        for v in 0..p {
            phases[u * p + v] = modulus.root_of_unity(sign * (u as i64) * (v as i64)) * scale;
        }
    }
    let mut amps = state.amps().to_vec();
    let mut column = vec![Complex64::new(0.0, 0.0); p];
    for axis in 0..n {
        let stride = p.pow((n - 1 - axis) as u32);
        let block = stride * p;
        for hi in 0..amps.len() / block {
            for lo in 0..stride {
                let base = hi * block + lo;
                for v in 0..p {
                    column[v] = amps[base + v * stride];
                }
                for u in 0..p {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for v in 0..p {
                        acc += phases[u * p + v] * column[v];
                    }
                    amps[base + u * stride] = acc;
                }
            }
        }
    }
    AmplitudeVector { modulus, n, amps }
}

/// Gram matrix of the Fourier-side degree components: M_{k,k'} sums
/// conj(g_tilde(y)) g_tilde(y') over same-syndrome pairs with |y| = k,
/// |y'| = k', scaled by 1/sqrt(C(m,k) C(m,k')). Equals the identity
/// whenever 2l+1 < d_perp.
pub fn gram_matrix(inst: &MaxLinSatInstance, l: usize) -> Result<Vec<Vec<Complex64>>> {
    let m = inst.num_constraints();
    let p = inst.modulus().get();
    if l > m {
        return Err(Error::InvalidParameter(format!(
            "degree l = {l} exceeds the constraint count m = {m}"
        )));
    }
    let needed: u128 = (0..=l).map(|k| weight_class_size(m, k, p)).sum();
    if needed > ERROR_ENUM_BUDGET {
        return Err(Error::BudgetExceeded {
            context: "gram matrix error enumeration",
            needed,
            budget: ERROR_ENUM_BUDGET,
        });
    }
    let g = build_g_table(inst);
    // syndrome -> per-weight sums of g_tilde over that coset
    let mut buckets: HashMap<Vec<u32>, Vec<Complex64>> = HashMap::new();
    for k in 0..=l {
        for_each_weight_k_vector(m, k, p, &mut |y| {
            let vec = crate::fp::FpVector::new(inst.modulus(), y.to_vec()).unwrap();
            let synd = inst.matrix().transpose_mat_vec(&vec).unwrap();
            let entry = buckets
                .entry(synd.entries().to_vec())
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); l + 1]);
            entry[k] += g.g_tilde_product(y);
            true
        });
    }
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); l + 1]; l + 1];
    for sums in buckets.values() {
        for k1 in 0..=l {
            for k2 in 0..=l {
                gram[k1][k2] += sums[k1].conj() * sums[k2];
            }
        }
    }
    for k1 in 0..=l {
        for k2 in 0..=l {
            let norm = (binomial_u128(m, k1) as f64 * binomial_u128(m, k2) as f64).sqrt();
            gram[k1][k2] /= norm;
        }
    }
    Ok(gram)
}

/// w^dagger M w for a square complex matrix.
pub fn quadratic_form(matrix: &[Vec<Complex64>], w: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut corr = Complex64::new(0.0, 0.0);
    for (k1, row) in matrix.iter().enumerate() {
        for (k2, &mkk) in row.iter().enumerate() {
            // Kahan on both components keeps large cancellations in check.
            let term = w[k1].conj() * mkk * w[k2];
            let y = term - corr;
            let t = acc + y;
            corr = (t - acc) - y;
            acc = t;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::FpVector;
    use crate::instance::{make_random, MaxLinSatInstance};

    fn single_set_instance(p: u64, rows: Vec<Vec<u32>>, sets: Vec<Vec<u32>>) -> MaxLinSatInstance {
        let modulus = PrimeModulus::new(p).unwrap();
        let m = rows.len();
        let n = rows[0].len();
        let entries: Vec<u32> = rows.into_iter().flatten().collect();
        let matrix = FpMatrix::new(modulus, m, n, entries).unwrap();
        MaxLinSatInstance::new(matrix, sets).unwrap()
    }

    #[test]
    fn g_table_binary_case() {
        // p=2, r=1, accepted value 0: mean 0, normalizer sqrt(2).
        let inst = single_set_instance(2, vec![vec![1]], vec![vec![0]]);
        let g = build_g_table(&inst);
        assert!((g.f_bar() - 0.0).abs() < 1e-15);
        assert!((g.phi() - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((g.g(0, 0) - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
        assert!((g.g(0, 1) + 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn g_table_satisfying_value_mod_3() {
        let inst = single_set_instance(3, vec![vec![1]], vec![vec![2]]);
        let g = build_g_table(&inst);
        assert!((g.g(0, 2) - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn g_table_invariants_random() {
        let inst = make_random(5, 6, 2, 3, 4).unwrap();
        let g = build_g_table(&inst);
        for i in 0..6 {
            let norm_g: f64 = (0..5).map(|x| g.g(i, x) * g.g(i, x)).sum();
            let norm_gt: f64 = (0..5).map(|y| g.g_tilde(i, y).norm_sqr()).sum();
            assert!((norm_g - 1.0).abs() < 1e-12, "constraint {i}: {norm_g}");
            assert!((norm_gt - 1.0).abs() < 1e-12, "constraint {i}: {norm_gt}");
            assert!(g.g_tilde(i, 0).norm() < 1e-12, "constraint {i}");
        }
        assert!((g.f_bar() - (2.0 * 3.0 / 5.0 - 1.0)).abs() < 1e-15);
        assert!((g.phi() - (4.0f64 * 3.0 * (1.0 - 3.0 / 5.0)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn symmetric_polys_match_tuple_enumeration() {
        // Independent oracle: sum over ordered tuples of distinct indices.
        fn tuple_oracle(values: &[f64], k: usize) -> f64 {
            fn recurse(values: &[f64], picked: &mut Vec<usize>, k: usize, acc: &mut f64) {
                if picked.len() == k {
                    *acc += picked.iter().map(|&i| values[i]).product::<f64>();
                    return;
                }
                for i in 0..values.len() {
                    if !picked.contains(&i) {
                        picked.push(i);
                        recurse(values, picked, k, acc);
                        picked.pop();
                    }
                }
            }
            if k == 0 {
                return 1.0;
            }
            let mut acc = 0.0;
            recurse(values, &mut Vec::new(), k, &mut acc);
            acc
        }

        let inst = make_random(3, 6, 2, 1, 9).unwrap();
        let g = build_g_table(&inst);
        let l = 4;
        let table = symmetric_poly_values(&inst, &g, l).unwrap();
        let state = AmplitudeVector::zeros(inst.modulus(), 2).unwrap();
        for idx in 0..state.len() {
            let x = FpVector::new(inst.modulus(), state.digits_of(idx)).unwrap();
            let bx = inst.matrix().mat_vec(&x).unwrap();
            let gvals: Vec<f64> = bx
                .entries()
                .iter()
                .enumerate()
                .map(|(i, &v)| g.g(i, v))
                .collect();
            for k in 0..=l {
                let expected = tuple_oracle(&gvals, k);
                let got = table[idx * (l + 1) + k];
                assert!(
                    (expected - got).abs() < 1e-12,
                    "idx {idx}, k {k}: {expected} vs {got}"
                );
            }
        }
    }

    #[test]
    fn symmetric_poly_low_orders() {
        let inst = make_random(5, 5, 2, 2, 13).unwrap();
        let g = build_g_table(&inst);
        let table = symmetric_poly_values(&inst, &g, 1).unwrap();
        let probe = AmplitudeVector::zeros(inst.modulus(), 2).unwrap();
        for idx in 0..probe.len() {
            assert_eq!(table[idx * 2], 1.0, "degree 0 is the empty product");
            let x = FpVector::new(inst.modulus(), probe.digits_of(idx)).unwrap();
            let bx = inst.matrix().mat_vec(&x).unwrap();
            let sum: f64 = bx
                .entries()
                .iter()
                .enumerate()
                .map(|(i, &v)| g.g(i, v))
                .sum();
            assert!((table[idx * 2 + 1] - sum).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_zero_state_is_uniform() {
        let inst = make_random(3, 5, 3, 1, 2).unwrap();
        let coeffs = DqiCoefficients::from_real(&[1.0]).unwrap();
        let state = build_dqi_state(&inst, &coeffs).unwrap();
        let expected = (3.0f64).powi(-3).sqrt();
        for &a in state.amps() {
            assert!((a - Complex64::new(expected, 0.0)).norm() < 1e-12);
        }
    }

    // 8x4 matrix whose transpose-kernel is the self-dual [8,4,4] code, so
    // the distance condition holds at l = 1.
    fn extended_hamming_matrix() -> FpMatrix {
        let modulus = PrimeModulus::new(2).unwrap();
        FpMatrix::new(
            modulus,
            8,
            4,
            vec![
                1, 0, 0, 0, //
                0, 1, 0, 0, //
                0, 0, 1, 0, //
                0, 0, 0, 1, //
                0, 1, 1, 1, //
                1, 0, 1, 1, //
                1, 1, 0, 1, //
                1, 1, 1, 0,
            ],
        )
        .unwrap()
    }

    #[test]
    fn state_norm_is_one_under_distance_condition() {
        let inst = MaxLinSatInstance::new(extended_hamming_matrix(), vec![vec![0]; 8]).unwrap();
        assert!(crate::fp::check_distance_condition(inst.matrix(), 1).holds());
        let coeffs = DqiCoefficients::from_real(&[0.6, 0.8]).unwrap();
        let state = build_dqi_state(&inst, &coeffs).unwrap();
        assert!(
            (state.norm_sq() - 1.0).abs() < 1e-9,
            "norm^2 = {}",
            state.norm_sq()
        );
    }

    #[test]
    fn fourier_round_trip_and_parseval() {
        let inst = make_random(5, 4, 3, 2, 8).unwrap();
        let coeffs = DqiCoefficients::from_real(&[0.5, 0.5, 0.5])
            .unwrap()
            .normalized()
            .unwrap();
        let state = build_dqi_state(&inst, &coeffs).unwrap();
        let transformed = fourier_state(&state, FourierDirection::Forward);
        assert!((transformed.norm_sq() - state.norm_sq()).abs() < 1e-10);
        let back = fourier_state(&transformed, FourierDirection::Inverse);
        for (a, b) in state.amps().iter().zip(back.amps()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn uniform_state_transforms_to_delta() {
        let modulus = PrimeModulus::new(3).unwrap();
        let n = 2;
        let len = 9;
        let amp = Complex64::new(1.0 / (len as f64).sqrt(), 0.0);
        let state = AmplitudeVector::new(modulus, n, vec![amp; len]).unwrap();
        let transformed = fourier_state(&state, FourierDirection::Forward);
        assert!((transformed.amps()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for &a in &transformed.amps()[1..] {
            assert!(a.norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_matches_syndrome_side_construction() {
        // Direct Fourier-side build: sum over errors y of weight <= l of
        // w_k g_tilde(y) / sqrt(C(m,k)) placed at index B^T y.
        let inst = make_random(3, 5, 2, 1, 31).unwrap();
        let coeffs = DqiCoefficients::from_real(&[0.3, -0.7, 0.648074069840786])
            .unwrap()
            .normalized()
            .unwrap();
        let state = build_dqi_state(&inst, &coeffs).unwrap();
        let transformed = fourier_state(&state, FourierDirection::Forward);

        let g = build_g_table(&inst);
        let mut direct = AmplitudeVector::zeros(inst.modulus(), 2).unwrap();
        let m = inst.num_constraints();
        for k in 0..=coeffs.degree() {
            let scale = coeffs.weights()[k] / (binomial_u128(m, k) as f64).sqrt();
            for_each_weight_k_vector(m, k, 3, &mut |y| {
                let yv = FpVector::new(inst.modulus(), y.to_vec()).unwrap();
                let synd = inst.matrix().transpose_mat_vec(&yv).unwrap();
                let idx = direct.index_of(synd.entries());
                let contribution = scale * g.g_tilde_product(y);
                direct.amps_mut()[idx] += contribution;
                true
            });
        }
        for (a, b) in transformed.amps().iter().zip(direct.amps()) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn gram_is_identity_under_distance_condition() {
        let inst = MaxLinSatInstance::new(extended_hamming_matrix(), vec![vec![1]; 8]).unwrap();
        let gram = gram_matrix(&inst, 1).unwrap();
        for k1 in 0..2 {
            for k2 in 0..2 {
                let expected = if k1 == k2 { 1.0 } else { 0.0 };
                assert!(
                    (gram[k1][k2] - Complex64::new(expected, 0.0)).norm() < 1e-9,
                    "entry ({k1},{k2}) = {}",
                    gram[k1][k2]
                );
            }
        }
    }

    #[test]
    fn gram_degree_zero_is_scalar_one() {
        let inst = make_random(3, 4, 2, 1, 3).unwrap();
        let gram = gram_matrix(&inst, 0).unwrap();
        assert!((gram[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gram_matches_statevector_inner_products_with_duplicate_rows() {
        // Duplicate rows break the distance condition; compare against
        // explicit Fourier-side component states.
        let inst = single_set_instance(
            2,
            vec![vec![1, 0], vec![1, 0], vec![0, 1]],
            vec![vec![0], vec![1], vec![0]],
        );
        let l = 2;
        let gram = gram_matrix(&inst, l).unwrap();

        let g = build_g_table(&inst);
        let m = 3;
        let mut components: Vec<AmplitudeVector> = Vec::new();
        for k in 0..=l {
            let mut comp = AmplitudeVector::zeros(inst.modulus(), 2).unwrap();
            let scale = 1.0 / (binomial_u128(m, k) as f64).sqrt();
            for_each_weight_k_vector(m, k, 2, &mut |y| {
                let yv = FpVector::new(inst.modulus(), y.to_vec()).unwrap();
                let synd = inst.matrix().transpose_mat_vec(&yv).unwrap();
                let idx = comp.index_of(synd.entries());
                let value = g.g_tilde_product(y) * scale;
                comp.amps_mut()[idx] += value;
                true
            });
            components.push(comp);
        }
        for k1 in 0..=l {
            for k2 in 0..=l {
                let inner: Complex64 = components[k1]
                    .amps()
                    .iter()
                    .zip(components[k2].amps())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                assert!(
                    (gram[k1][k2] - inner).norm() < 1e-9,
                    "entry ({k1},{k2}): {} vs {inner}",
                    gram[k1][k2]
                );
            }
        }
    }

    #[test]
    fn norm_equals_gram_quadratic_form() {
        for seed in [1u64, 2, 3] {
            let inst = make_random(3, 5, 2, 1, seed).unwrap();
            let coeffs = DqiCoefficients::new(vec![
                Complex64::new(0.4, 0.1),
                Complex64::new(-0.3, 0.2),
                Complex64::new(0.5, 0.0),
            ])
            .unwrap();
            let state = build_dqi_state(&inst, &coeffs).unwrap();
            let gram = gram_matrix(&inst, coeffs.degree()).unwrap();
            let predicted = quadratic_form(&gram, coeffs.weights());
            assert!(
                (state.norm_sq() - predicted.re).abs() < 1e-9,
                "seed {seed}: {} vs {predicted}",
                state.norm_sq()
            );
            assert!(predicted.im.abs() < 1e-10);
        }
    }

    #[test]
    fn binary_dump_round_trip() {
        let inst = make_random(3, 4, 2, 1, 5).unwrap();
        let coeffs = DqiCoefficients::from_real(&[0.8, 0.6]).unwrap();
        let state = build_dqi_state(&inst, &coeffs).unwrap();
        let mut buf = Vec::new();
        state.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 16 * state.len());
        let back = AmplitudeVector::read_binary(buf.as_slice()).unwrap();
        assert_eq!(state, back);
    }

    #[test]
    fn state_budget_is_enforced() {
        let modulus = PrimeModulus::new(31).unwrap();
        assert!(matches!(
            AmplitudeVector::zeros(modulus, 6),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn gram_budget_is_enforced() {
        let modulus = PrimeModulus::new(2).unwrap();
        let m = 5000;
        let entries: Vec<u32> = (0..m * 2).map(|i| (i % 2) as u32).collect();
        let matrix = FpMatrix::new(modulus, m, 2, entries).unwrap();
        let inst = MaxLinSatInstance::new(matrix, vec![vec![1]; m]).unwrap();
        assert!(matches!(
            gram_matrix(&inst, 3),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn index_round_trip() {
        let modulus = PrimeModulus::new(5).unwrap();
        let state = AmplitudeVector::zeros(modulus, 3).unwrap();
        for idx in 0..state.len() {
            let digits = state.digits_of(idx);
            assert_eq!(state.index_of(&digits), idx);
        }
        assert_eq!(state.index_of(&[1, 2, 3]), 25 + 10 + 3);
    }
}
