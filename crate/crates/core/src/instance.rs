//! The Max-LinSAT problem model: a matrix B over F_p together with one
//! accepted-value set per constraint, all of common cardinality r.
//!
//! Two structured instance families are provided: the polynomial
//! intersection family (power-basis rows, every row fully dense) and sparse
//! parity instances over F_2 with a prescribed constraint-degree
//! distribution.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fp::{FpMatrix, FpVector, PrimeModulus};

/// A Max-LinSAT instance: maximize the number of constraints (Bx)_i in F_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxLinSatInstance {
    matrix: FpMatrix,
    constraint_sets: Vec<Vec<u32>>,
    r: usize,
    /// Minimum distance of ker(B^T) when known analytically for the family;
    /// lets the predictor skip kernel enumeration at sizes where it is
    /// infeasible. `None` means "establish by enumeration".
    dual_distance: Option<usize>,
}

impl MaxLinSatInstance {
    /// Validates that every set has the same cardinality r with
    /// 1 <= r <= p-1, distinct in-range members, and one set per row.
    pub fn new(matrix: FpMatrix, constraint_sets: Vec<Vec<u32>>) -> Result<Self> {
        let p = matrix.modulus().get();
        if constraint_sets.len() != matrix.rows() {
            return Err(Error::DimensionMismatch {
                context: "constraint sets",
                expected: matrix.rows(),
                got: constraint_sets.len(),
            });
        }
        let r = constraint_sets.first().map_or(0, Vec::len);
        if r == 0 || r as u64 > p as u64 - 1 {
            return Err(Error::InvalidParameter(format!(
                "set cardinality r = {r} outside 1..={}",
                p - 1
            )));
        }
        for (i, set) in constraint_sets.iter().enumerate() {
            if set.len() != r {
                return Err(Error::InvalidParameter(format!(
                    "constraint {i} has {} accepted values, expected {r}",
                    set.len()
                )));
            }
            if set.iter().any(|&v| v >= p) {
                return Err(Error::InvalidParameter(format!(
                    "constraint {i} contains a value outside F_{p}"
                )));
            }
            let mut sorted = set.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != r {
                return Err(Error::InvalidParameter(format!(
                    "constraint {i} contains duplicate accepted values"
                )));
            }
        }
        Ok(Self {
            matrix,
            constraint_sets,
            r,
            dual_distance: None,
        })
    }

    #[inline]
    pub fn matrix(&self) -> &FpMatrix {
        &self.matrix
    }

    #[inline]
    pub fn constraint_sets(&self) -> &[Vec<u32>] {
        &self.constraint_sets
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.matrix.modulus()
    }

    #[inline]
    pub fn num_constraints(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn num_variables(&self) -> usize {
        self.matrix.cols()
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn dual_distance(&self) -> Option<usize> {
        self.dual_distance
    }

    /// Records an analytically known minimum distance of ker(B^T).
    pub fn with_dual_distance(mut self, d: usize) -> Self {
        self.dual_distance = Some(d);
        self
    }

    /// Per-constraint membership masks, indexed `[i][value]`.
    pub fn membership_masks(&self) -> Vec<Vec<bool>> {
        let p = self.modulus().get() as usize;
        self.constraint_sets
            .iter()
            .map(|set| {
                let mut mask = vec![false; p];
                for &v in set {
                    mask[v as usize] = true;
                }
                mask
            })
            .collect()
    }

    /// Number of satisfied constraints s(x) = |{i : (Bx)_i in F_i}|.
    pub fn score(&self, x: &FpVector) -> Result<usize> {
        let bx = self.matrix.mat_vec(x)?;
        Ok(bx
            .entries()
            .iter()
            .zip(&self.constraint_sets)
            .filter(|(v, set)| set.contains(v))
            .count())
    }

    /// The +-1-valued objective f(x) = 2 s(x) - m.
    pub fn objective(&self, x: &FpVector) -> Result<i64> {
        Ok(2 * self.score(x)? as i64 - self.num_constraints() as i64)
    }

    /// Replaces every accepted-value set by a fresh uniform r-subset drawn
    /// from the given seed. Used when averaging results over set choices.
    pub fn resample_sets(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = self.modulus().get();
        let sets = (0..self.num_constraints())
            .map(|_| sample_subset(&mut rng, p, self.r))
            .collect();
        Self {
            matrix: self.matrix.clone(),
            constraint_sets: sets,
            r: self.r,
            dual_distance: self.dual_distance,
        }
    }

    /// Replaces the accepted-value sets wholesale (validated).
    pub fn with_sets(&self, sets: Vec<Vec<u32>>) -> Result<Self> {
        let inst = Self::new(self.matrix.clone(), sets)?;
        Ok(Self {
            dual_distance: self.dual_distance,
            ..inst
        })
    }

    /// Serializes to the plaintext instance format:
    ///
    /// ```text
    /// p m n r
    /// <m rows of n residues>
    /// <m lines of r accepted values>
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let (m, n) = (self.num_constraints(), self.num_variables());
        writeln!(out, "{} {} {} {}", self.modulus().get(), m, n, self.r).unwrap();
        for i in 0..m {
            let row: Vec<String> = self.matrix.row(i).iter().map(u32::to_string).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        for set in &self.constraint_sets {
            let vals: Vec<String> = set.iter().map(u32::to_string).collect();
            writeln!(out, "{}", vals.join(" ")).unwrap();
        }
        out
    }

    /// Parses the plaintext instance format. Inverse of [`Self::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty instance file".into(),
        })?;
        let head: Vec<u64> = parse_numbers(header, 1)?;
        if head.len() != 4 {
            return Err(Error::Parse {
                line: 1,
                message: format!("header must be `p m n r`, got {} fields", head.len()),
            });
        }
        let (p, m, n, r) = (
            head[0],
            head[1] as usize,
            head[2] as usize,
            head[3] as usize,
        );
        let modulus = PrimeModulus::new(p)?;
        let mut entries = Vec::with_capacity(m * n);
        for _ in 0..m {
            let (idx, line) = lines.next().ok_or(Error::Parse {
                line: m + 1,
                message: "missing matrix row".into(),
            })?;
            let row: Vec<u64> = parse_numbers(line, idx + 1)?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {n} entries, got {}", row.len()),
                });
            }
            entries.extend(row.into_iter().map(|v| v as u32));
        }
        let matrix = FpMatrix::new(modulus, m, n, entries)?;
        let mut sets = Vec::with_capacity(m);
        for _ in 0..m {
            let (idx, line) = lines.next().ok_or(Error::Parse {
                line: 2 * m + 1,
                message: "missing constraint set".into(),
            })?;
            let vals: Vec<u64> = parse_numbers(line, idx + 1)?;
            if vals.len() != r {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {r} accepted values, got {}", vals.len()),
                });
            }
            sets.push(vals.into_iter().map(|v| v as u32).collect());
        }
        Self::new(matrix, sets)
    }
}

fn parse_numbers(line: &str, line_no: usize) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid number `{tok}`"),
            })
        })
        .collect()
}

/// Uniform r-subset of F_p, sorted ascending. Partial Fisher-Yates so the
/// draw is reproducible for a given RNG stream.
fn sample_subset(rng: &mut ChaCha8Rng, p: u32, r: usize) -> Vec<u32> {
    let mut pool: Vec<u32> = (0..p).collect();
    for slot in 0..r {
        let pick = rng.random_range(slot..pool.len());
        pool.swap(slot, pick);
    }
    let mut subset = pool[..r].to_vec();
    subset.sort_unstable();
    subset
}

/// Builds the polynomial intersection instance: B is the (p-1) x n matrix
/// with entries i^(j-1) over rows i = 1..p-1, and the accepted-value sets
/// are seeded uniform r-subsets.
///
/// The row space of B is an evaluation code of degree < n polynomials at the
/// nonzero field points, an MDS code, so ker(B^T) has minimum distance
/// exactly n+1; the instance carries that as its dual distance.
pub fn make_opi(p: u64, n: usize, r: usize, seed: u64) -> Result<MaxLinSatInstance> {
    let modulus = PrimeModulus::new(p)?;
    if n == 0 || n as u64 >= p {
        return Err(Error::InvalidParameter(format!(
            "polynomial degree bound requires 1 <= n < p, got n = {n}, p = {p}"
        )));
    }
    let m = (p - 1) as usize;
    let mut entries = Vec::with_capacity(m * n);
    for i in 1..=m as u32 {
        for j in 0..n as u32 {
            entries.push(modulus.pow(i, j));
        }
    }
    let matrix = FpMatrix::new(modulus, m, n, entries)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = (0..m)
        .map(|_| sample_subset(&mut rng, modulus.get(), r))
        .collect();
    Ok(MaxLinSatInstance::new(matrix, sets)?.with_dual_distance(n + 1))
}

/// Same matrix as [`make_opi`] with caller-supplied accepted-value sets.
pub fn make_opi_with_sets(p: u64, n: usize, sets: Vec<Vec<u32>>) -> Result<MaxLinSatInstance> {
    let r = sets.first().map_or(1, Vec::len);
    let template = make_opi(p, n, r.max(1), 0)?;
    template.with_sets(sets)
}

/// Fraction of constraints carrying each degree, for parity instances.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pairs: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    /// Validates degrees >= 1 and fractions summing to 1 within 1e-12.
    pub fn new(mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter(
                "degree distribution must be nonempty".into(),
            ));
        }
        pairs.sort_by_key(|&(j, _)| j);
        for window in pairs.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(Error::InvalidParameter(format!(
                    "duplicate degree {} in distribution",
                    window[0].0
                )));
            }
        }
        let mut total = 0.0;
        for &(j, kappa) in &pairs {
            if j == 0 {
                return Err(Error::InvalidParameter("degree 0 not allowed".into()));
            }
            if !(0.0..=1.0).contains(&kappa) {
                return Err(Error::InvalidParameter(format!(
                    "fraction {kappa} for degree {j} outside [0, 1]"
                )));
            }
            total += kappa;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "degree fractions sum to {total}, expected 1"
            )));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, f64)] {
        &self.pairs
    }

    /// Splits m constraints across degrees by largest-remainder rounding;
    /// remainder ties go to the smaller degree.
    pub fn counts_for(&self, m: usize) -> Vec<(usize, usize)> {
        let mut counts: Vec<(usize, usize, f64)> = self
            .pairs
            .iter()
            .map(|&(j, kappa)| {
                let exact = kappa * m as f64;
                (j, exact.floor() as usize, exact - exact.floor())
            })
            .collect();
        let assigned: usize = counts.iter().map(|&(_, c, _)| c).sum();
        let mut leftover = m.saturating_sub(assigned);
        // Stable sort keeps degree order among equal remainders.
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| counts[b].2.partial_cmp(&counts[a].2).unwrap());
        let mut cursor = 0;
        while leftover > 0 {
            counts[order[cursor % order.len()]].1 += 1;
            leftover -= 1;
            cursor += 1;
        }
        counts.into_iter().map(|(j, c, _)| (j, c)).collect()
    }
}

/// How the accepted value of each parity constraint is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RhsMode {
    /// Every constraint accepts 0.
    Zero,
    /// Each accepted value drawn uniformly from F_2 (seeded).
    Uniform,
    /// Caller-specified accepted values, one per constraint.
    Fixed(Vec<u32>),
}

/// Builds a sparse parity instance over F_2: each row's support is a uniform
/// j-subset of the columns, with j drawn from the degree distribution, and
/// every accepted-value set is the singleton prescribed by `rhs`.
pub fn make_xorsat(
    m: usize,
    n: usize,
    dist: &DegreeDistribution,
    rhs: RhsMode,
    seed: u64,
) -> Result<MaxLinSatInstance> {
    let modulus = PrimeModulus::new(2)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "parity instance needs m >= 1 and n >= 1".into(),
        ));
    }
    for &(j, kappa) in dist.pairs() {
        if j > n && kappa > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "degree {j} exceeds the number of variables {n}"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(m * n);
    for (degree, count) in dist.counts_for(m) {
        for _ in 0..count {
            let mut row = vec![0u32; n];
            let mut pool: Vec<usize> = (0..n).collect();
            for slot in 0..degree {
                let pick = rng.random_range(slot..pool.len());
                pool.swap(slot, pick);
                row[pool[slot]] = 1;
            }
            entries.extend(row);
        }
    }
    let matrix = FpMatrix::new(modulus, m, n, entries)?;
    let sets: Vec<Vec<u32>> = match rhs {
        RhsMode::Zero => vec![vec![0]; m],
        RhsMode::Uniform => (0..m).map(|_| vec![rng.random_range(0..2u32)]).collect(),
        RhsMode::Fixed(values) => {
            if values.len() != m {
                return Err(Error::DimensionMismatch {
                    context: "fixed accepted values",
                    expected: m,
                    got: values.len(),
                });
            }
            values.into_iter().map(|v| vec![v]).collect()
        }
    };
    MaxLinSatInstance::new(matrix, sets)
}

/// Uniformly random dense instance: every matrix entry uniform in F_p and
/// every accepted-value set a uniform r-subset.
pub fn make_random(p: u64, m: usize, n: usize, r: usize, seed: u64) -> Result<MaxLinSatInstance> {
    let modulus = PrimeModulus::new(p)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "instance needs m >= 1 and n >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<u32> = (0..m * n)
        .map(|_| rng.random_range(0..modulus.get()))
        .collect();
    let matrix = FpMatrix::new(modulus, m, n, entries)?;
    let sets = (0..m)
        .map(|_| sample_subset(&mut rng, modulus.get(), r))
        .collect();
    MaxLinSatInstance::new(matrix, sets)
}
