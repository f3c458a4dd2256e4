//! Shared fixtures for the benchmarks in `benches/`.

use linsep_core::data::{generate_separable, SeparableSpec};
use linsep_core::trainer::{initialize, InitScheme};
use linsep_core::{seeded_rng, Activation, LabeledDataset, NetworkParams};

/// Separable data with a norm-2 separator.
pub fn dataset(d: usize, n: usize) -> LabeledDataset {
    generate_separable(&SeparableSpec { d, n, norm_wstar: 2.0, seed: 1 }).expect("feasible margin")
}

/// Leaky ReLU network with the default initialization.
pub fn network(k: usize, d: usize) -> NetworkParams {
    let act = Activation::leaky_relu(0.25).expect("valid alpha");
    initialize(&InitScheme::Default, k, d, act, &mut seeded_rng(2)).expect("valid shape")
}
