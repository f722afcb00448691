//! Desk-scale laboratory for decoded-interference optimization under local
//! depolarizing noise.
//!
//! The crate models maximum linear satisfiability (Max-LinSAT) over a prime
//! field F_p, builds the interference state exactly as a dense amplitude
//! vector, applies per-qudit depolarizing noise to its measurement
//! distribution, and compares the resulting expected satisfied-constraint
//! count against closed-form predictions driven by a noise-weighted sparsity
//! parameter of the instance matrix. An imperfect-decoder regime with
//! controllable failure rates and a suite of exact brute-force oracles round
//! out the toolbox.
//!
//! Modules follow the pipeline:
//!
//! - [`fp`]: exact arithmetic and linear algebra over F_p,
//! - [`instance`]: the Max-LinSAT problem model and instance families,
//! - [`state`]: the interference state, its Fourier transform and Gram matrix,
//! - [`noise`]: depolarizing noise, output distributions and samplers,
//! - [`predictor`]: tridiagonal eigenproblem and performance formulas,
//! - [`decoder`]: syndrome tables, failure partitions, postselected states,
//! - [`oracles`]: independent enumeration-based verification in exact
//!   rational arithmetic.

mod accum;
pub mod decoder;
mod error;
pub mod fp;
pub mod instance;
pub mod noise;
pub mod oracles;
pub mod predictor;
pub mod state;

pub use error::{Error, Result};
pub use fp::{FpMatrix, FpVector, PrimeModulus};
pub use instance::MaxLinSatInstance;
pub use noise::NoiseModel;
pub use state::{AmplitudeVector, DqiCoefficients};
