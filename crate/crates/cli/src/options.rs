//! Command-line surface. Grid, weight and distribution syntaxes are parsed
//! by `FromStr` implementations so malformed values surface as usage
//! errors.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

#[derive(Parser, Debug)]
#[command(
    name = "dqi",
    version,
    about = "Noisy interference-optimization laboratory over prime fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Closed-form prediction rows over a noise grid.
    Predict(PredictArgs),
    /// Exact (and optionally sampled) noisy scores from the dense state.
    Simulate(SimulateArgs),
    /// Prediction next to exact simulation over a noise grid.
    Sweep(SweepArgs),
    /// Imperfect-decoder experiment against the closed-form lower bound.
    DecodeLab(DecodeLabArgs),
    /// Run the enumeration-backed identity suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(subcommand)]
    pub family: GenFamily,
}

#[derive(Subcommand, Debug)]
pub enum GenFamily {
    /// Polynomial-intersection instance: power-basis rows, m = p - 1.
    Opi {
        /// Field size (prime).
        #[arg(long)]
        p: u64,
        /// Number of variables (polynomial degree bound), 1 <= n < p.
        #[arg(long)]
        n: usize,
        /// Accepted-set cardinality; defaults to p / 2.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sparse parity instance over F_2 with a degree distribution.
    Xorsat {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Degree distribution as `degree:fraction[,degree:fraction...]`.
        #[arg(long)]
        deg: DegreeSpec,
        /// Accepted parity per constraint.
        #[arg(long, value_enum, default_value_t = RhsChoice::Uniform)]
        rhs: RhsChoice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense uniform instance.
    Random {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RhsChoice {
    /// Every constraint accepts 0.
    Zero,
    /// Seeded uniform accepted parity per constraint.
    Uniform,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Instance file path.
    #[arg(long)]
    pub inst: PathBuf,
    /// Polynomial degree l.
    #[arg(long)]
    pub l: usize,
    /// Noise grid: a single rate or `start:stop:step` (inclusive).
    #[arg(long)]
    pub eps: EpsGrid,
    /// Degree weights: `principal` or comma-separated `re:im` pairs.
    #[arg(long, default_value = "principal")]
    pub w: WeightSpec,
    /// Known minimum distance of ker(B^T), replacing kernel enumeration.
    #[arg(long)]
    pub dual_distance: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub inst: PathBuf,
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub eps: EpsGrid,
    #[arg(long, default_value = "principal")]
    pub w: WeightSpec,
    /// Also draw shots and report the sampled mean and standard error.
    #[arg(long)]
    pub sampled: bool,
    #[arg(long, default_value_t = 100_000, requires = "sampled")]
    pub shots: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub inst: PathBuf,
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub eps: EpsGrid,
    #[arg(long, default_value = "principal")]
    pub w: WeightSpec,
    #[arg(long)]
    pub dual_distance: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecodeLabArgs {
    #[arg(long)]
    pub inst: PathBuf,
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub eps: EpsGrid,
    #[arg(long, default_value = "principal")]
    pub w: WeightSpec,
    /// Failure injection per weight: `weight:fraction[,weight:fraction...]`.
    #[arg(long)]
    pub inject: Option<InjectSpec>,
    #[arg(long, default_value_t = 0)]
    pub inject_seed: u64,
    /// Right-hand-side sample count; exhaustive over all 2^m when omitted
    /// and m <= 10.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub sample_seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Corrupt the row survival factor on purpose; the suite must fail.
    #[arg(long, hide = true)]
    pub mutate_tau: bool,
}

/// Inclusive noise grid `start:stop:step`, or a single rate.
#[derive(Clone, Debug)]
pub struct EpsGrid(pub Vec<f64>);

impl FromStr for EpsGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |tok: &str| -> Result<f64, String> {
            tok.parse::<f64>()
                .map_err(|_| format!("invalid noise rate `{tok}`"))
        };
        let values = match parts.as_slice() {
            [single] => vec![parse(single)?],
            [start, stop, step] => {
                let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
                if step <= 0.0 {
                    return Err("grid step must be positive".into());
                }
                if stop < start {
                    return Err("grid stop must not precede start".into());
                }
                let count = ((stop - start) / step + 1.0 + 1e-9).floor() as usize;
                (0..count).map(|i| start + step * i as f64).collect()
            }
            _ => return Err("expected `rate` or `start:stop:step`".into()),
        };
        if values.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
            return Err("noise rates must lie in [0, 1]".into());
        }
        Ok(EpsGrid(values))
    }
}

/// Degree weights: the principal eigenvector, or explicit complex pairs.
#[derive(Clone, Debug)]
pub enum WeightSpec {
    Principal,
    Explicit(Vec<Complex64>),
}

impl FromStr for WeightSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "principal" {
            return Ok(WeightSpec::Principal);
        }
        let weights = s
            .split(',')
            .map(|pair| {
                let (re, im) = match pair.split_once(':') {
                    Some((re, im)) => (re, im),
                    None => (pair, "0"),
                };
                let re: f64 = re
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid real part `{re}`"))?;
                let im: f64 = im
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid imaginary part `{im}`"))?;
                Ok(Complex64::new(re, im))
            })
            .collect::<Result<Vec<_>, String>>()?;
        if weights.is_empty() {
            return Err("weight list must be nonempty".into());
        }
        Ok(WeightSpec::Explicit(weights))
    }
}

/// `degree:fraction` pairs for parity instances.
#[derive(Clone, Debug)]
pub struct DegreeSpec(pub Vec<(usize, f64)>);

impl FromStr for DegreeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|pair| {
                let (deg, frac) = pair
                    .split_once(':')
                    .ok_or_else(|| format!("expected `degree:fraction`, got `{pair}`"))?;
                let deg: usize = deg
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid degree `{deg}`"))?;
                let frac: f64 = frac
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid fraction `{frac}`"))?;
                Ok((deg, frac))
            })
            .collect::<Result<Vec<_>, String>>()
            .map(DegreeSpec)
    }
}

/// `weight:fraction` pairs for decoder failure injection.
#[derive(Clone, Debug)]
pub struct InjectSpec(pub Vec<(usize, f64)>);

impl FromStr for InjectSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DegreeSpec::from_str(s).map(|DegreeSpec(pairs)| InjectSpec(pairs))
    }
}
