//! Exact arithmetic and linear algebra over a prime field F_p.
//!
//! Residues are stored as machine integers and every operation reduces
//! eagerly, so intermediate products stay well inside `u64` for the supported
//! modulus range (p < 2^15). All values are immutable after construction and
//! safe to share across threads.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default candidate cap for [`check_distance_condition`].
pub const DISTANCE_ENUM_BUDGET: u128 = 100_000_000;

/// A verified prime modulus p, together with phase evaluation for the p-th
/// root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeModulus {
    p: u32,
}

impl PrimeModulus {
    /// Verifies primality by trial division. Moduli are capped at 2^15 so
    /// that row dot products cannot overflow a `u64`.
    pub fn new(p: u64) -> Result<Self> {
        if p >= (1 << 15) {
            return Err(Error::ModulusTooLarge(p));
        }
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Self { p: p as u32 })
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u32 {
        (v % self.p as u64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Modular exponentiation by repeated squaring.
    pub fn pow(self, base: u32, mut exp: u32) -> u32 {
        let mut acc = 1u32;
        let mut b = base % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Evaluates omega_p^exponent where omega_p = exp(i 2 pi / p).
    ///
    /// p = 2 is special-cased so that phases are exactly +1/-1.
    pub fn root_of_unity(self, exponent: i64) -> Complex64 {
        let r = exponent.rem_euclid(self.p as i64) as u32;
        if r == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if self.p == 2 {
            return Complex64::new(-1.0, 0.0);
        }
        let theta = 2.0 * std::f64::consts::PI * r as f64 / self.p as f64;
        let (sin, cos) = theta.sin_cos();
        Complex64::new(cos, sin)
    }
}

/// A vector of residues in {0, ..., p-1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpVector {
    modulus: PrimeModulus,
    entries: Vec<u32>,
}

impl FpVector {
    /// Builds a vector, rejecting out-of-range entries.
    pub fn new(modulus: PrimeModulus, entries: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e >= modulus.get()) {
            return Err(Error::InvalidParameter(format!(
                "vector entry {bad} is not a residue mod {}",
                modulus.get()
            )));
        }
        Ok(Self { modulus, entries })
    }

    pub fn zeros(modulus: PrimeModulus, len: usize) -> Self {
        Self {
            modulus,
            entries: vec![0; len],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }
}

/// Number of nonzero entries of a residue vector.
pub fn hamming_weight(v: &FpVector) -> usize {
    v.entries().iter().filter(|&&e| e != 0).count()
}

/// An m x n matrix over F_p, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    modulus: PrimeModulus,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl FpMatrix {
    pub fn new(modulus: PrimeModulus, rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimensions must be at least 1 x 1".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= modulus.get()) {
            return Err(Error::InvalidParameter(format!(
                "matrix entry {bad} is not a residue mod {}",
                modulus.get()
            )));
        }
        Ok(Self {
            modulus,
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(modulus: PrimeModulus, n: usize) -> Result<Self> {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Self::new(modulus, n, n, entries)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Computes B x mod p (length m).
    pub fn mat_vec(&self, x: &FpVector) -> Result<FpVector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "mat_vec input",
                expected: self.cols,
                got: x.len(),
            });
        }
        let p = self.modulus;
        let out = (0..self.rows)
            .map(|i| {
                let acc: u64 = self
                    .row(i)
                    .iter()
                    .zip(x.entries())
                    .map(|(&b, &xj)| b as u64 * xj as u64)
                    .sum();
                p.reduce(acc)
            })
            .collect();
        Ok(FpVector {
            modulus: p,
            entries: out,
        })
    }

    /// Computes B^T y mod p (length n); these are the syndromes of error
    /// vectors y.
    pub fn transpose_mat_vec(&self, y: &FpVector) -> Result<FpVector> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "transpose_mat_vec input",
                expected: self.rows,
                got: y.len(),
            });
        }
        let p = self.modulus;
        let mut acc = vec![0u64; self.cols];
        for (i, &yi) in y.entries().iter().enumerate() {
            if yi == 0 {
                continue;
            }
            for (j, &b) in self.row(i).iter().enumerate() {
                acc[j] += b as u64 * yi as u64;
            }
        }
        let entries = acc.into_iter().map(|v| p.reduce(v)).collect();
        Ok(FpVector {
            modulus: p,
            entries,
        })
    }

    /// Number of nonzero entries of each row.
    pub fn row_degrees(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|i| self.row(i).iter().filter(|&&b| b != 0).count())
            .collect()
    }
}

/// Outcome of the dual-distance test on ker(B^T).
#[derive(Debug, Clone, PartialEq)]
pub enum DistanceCheck {
    /// No nonzero vector of weight <= 2l+1 lies in ker(B^T).
    Holds,
    /// A minimum-weight kernel vector within the tested range.
    Violated { witness: FpVector },
    /// The candidate cap was reached before the range was exhausted; never
    /// silently treated as a pass.
    Undecided { examined: u128 },
}

impl DistanceCheck {
    pub fn holds(&self) -> bool {
        matches!(self, DistanceCheck::Holds)
    }
}

/// Decides whether 2l+1 < d_perp, where d_perp is the minimum Hamming weight
/// of a nonzero vector in ker(B^T), by enumerating all candidate vectors of
/// weight 1..=2l+1 in ascending weight order.
pub fn check_distance_condition(b: &FpMatrix, l: usize) -> DistanceCheck {
    check_distance_condition_with_budget(b, l, DISTANCE_ENUM_BUDGET)
}

/// Same as [`check_distance_condition`] with an explicit candidate cap.
pub fn check_distance_condition_with_budget(b: &FpMatrix, l: usize, budget: u128) -> DistanceCheck {
    let m = b.rows();
    let p = b.modulus();
    let max_weight = (2 * l + 1).min(m);
    let mut examined: u128 = 0;
    for w in 1..=max_weight {
        let mut witness = None;
        let exhausted = for_each_weight_k_vector(m, w, p.get(), &mut |v| {
            examined += 1;
            if examined > budget {
                return false;
            }
            let vec = FpVector {
                modulus: p,
                entries: v.to_vec(),
            };
            let synd = b.transpose_mat_vec(&vec).expect("length m by construction");
            if hamming_weight(&synd) == 0 {
                witness = Some(vec);
                return false;
            }
            true
        });
        if let Some(witness) = witness {
            return DistanceCheck::Violated { witness };
        }
        if !exhausted {
            return DistanceCheck::Undecided { examined };
        }
    }
    DistanceCheck::Holds
}

/// Number of length-m vectors of Hamming weight exactly k over F_p:
/// C(m,k) (p-1)^k.
pub fn weight_class_size(m: usize, k: usize, p: u32) -> u128 {
    binomial_u128(m, k) * (p as u128 - 1).pow(k as u32)
}

pub fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Calls `f` for every vector in F_p^m of Hamming weight exactly k, in
/// ascending support / value order. `f` returns `false` to stop early; the
/// return value reports whether the enumeration ran to completion.
///
/// The visitor borrows a scratch buffer that is reused between calls.
pub fn for_each_weight_k_vector(
    m: usize,
    k: usize,
    p: u32,
    f: &mut impl FnMut(&[u32]) -> bool,
) -> bool {
    if k > m {
        return true;
    }
    let mut buf = vec![0u32; m];
    if k == 0 {
        return f(&buf);
    }
    let mut support: Vec<usize> = (0..k).collect();
    loop {
        // Odometer over the (p-1)^k nonzero values on the current support.
        let mut values = vec![1u32; k];
        loop {
            for (slot, &pos) in support.iter().enumerate() {
                buf[pos] = values[slot];
            }
            if !f(&buf) {
                return false;
            }
            let mut carry = k;
            for slot in (0..k).rev() {
                if values[slot] + 1 < p {
                    values[slot] += 1;
                    carry = slot;
                    break;
                }
                values[slot] = 1;
            }
            if carry == k {
                break;
            }
        }
        for &pos in &support {
            buf[pos] = 0;
        }
        // Next k-combination of [0, m) in lexicographic order.
        let mut idx = k;
        for slot in (0..k).rev() {
            if support[slot] != slot + m - k {
                idx = slot;
                break;
            }
        }
        if idx == k {
            return true;
        }
        support[idx] += 1;
        for slot in idx + 1..k {
            support[slot] = support[slot - 1] + 1;
        }
    }
}
