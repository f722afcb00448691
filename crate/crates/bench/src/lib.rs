//! Shared fixtures for the benchmark suite.

use dqi_core::instance::{make_random, MaxLinSatInstance};

/// A mid-size instance with a dense 3^10 state space.
pub fn bench_instance() -> MaxLinSatInstance {
    make_random(3, 24, 10, 1, 99).unwrap()
}

/// A parity instance small enough for decoder experiments.
pub fn parity_instance() -> MaxLinSatInstance {
    make_random(2, 14, 8, 1, 4).unwrap()
}
