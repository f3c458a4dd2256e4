//! Stochastic gradient descent on over-parameterized two-layer networks with a
//! fixed second layer, trained with the hinge loss on linearly separable data.
//!
//! The crate is organised bottom-up:
//!
//! - [`types`] and [`rng`]: domain types and the deterministic random stream.
//! - [`network`]: forward pass, hinge loss, subgradients, critical-point checks.
//! - [`trainer`]: batch-size-1 SGD with exact non-zero update accounting.
//! - [`bounds`]: closed-form update counts and generalization bounds.
//! - [`constructions`]: adversarial sequences, the ReLU bad local minimum and
//!   the orthogonal-basis dead-set analysis.
//! - [`data`]: synthetic separable data, separator estimation and IDX files.

// `!(x > 0.0)` rejects NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod constructions;
pub mod data;
pub mod error;
pub mod network;
pub mod rng;
pub mod trainer;
pub mod types;

pub use error::{Error, Result};
pub use rng::{seeded_rng, SeededRng};
pub use types::{
    Activation, EpochStats, Example, LabeledDataset, Matrix, NetworkParams, RunRecord, RunStatus,
    SamplingOrder, TrainConfig, TrajectoryPoint,
};
