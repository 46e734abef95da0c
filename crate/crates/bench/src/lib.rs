//! Shared fixtures for the benchmark targets.

use dualrx_core::channel::EnvParams;

/// The reference parameter set used across the benchmarks.
pub fn reference_env(xi: f64) -> EnvParams {
    EnvParams::new(20.0, 20.0, 6.0, 79.4, 0.8, 1000.0, 0.5, xi).unwrap()
}
