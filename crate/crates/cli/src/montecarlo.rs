//! Monte Carlo estimate of ReLU success on orthogonal data.

use linsep_core::constructions::{dead_set, orthogonal_dataset, predict_relu_outcome, ReluOutcome};
use linsep_core::trainer::{initialize, train_observed, InitScheme};
use linsep_core::{seeded_rng, Activation, RunStatus, SamplingOrder, TrainConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub trials: usize,
    pub frac_global: f64,
    pub frac_nonglobal: f64,
    /// Largest non-zero update count over trials that reached a global minimum;
    /// `0` when none did.
    pub max_iters_when_global: u64,
}

struct Trial {
    global: bool,
    iters: u64,
}

/// Seed of the training stream for a run seeded with `seed`; keeps it apart
/// from the initialization stream.
pub fn train_seed(seed: u64) -> u64 {
    !seed
}

fn run_trial(d: usize, k: usize, c: f64, eta: f64, order: SamplingOrder, seed: u64) -> Result<Trial> {
    let data = orthogonal_dataset(d)?;
    let params = initialize(&InitScheme::SymmetricBox { c }, k, d, Activation::Relu, &mut seeded_rng(seed))?;
    let k0 = dead_set(&params);
    let predicted = predict_relu_outcome(&params);
    let config = TrainConfig::new(eta).with_seed(train_seed(seed)).with_order(order);
    let mut changed_at = None;
    let out = train_observed(params, &data, &config, None, |ev| {
        if changed_at.is_none() && dead_set(ev.params) != k0 {
            changed_at = Some(ev.step);
        }
    })?;
    if let Some(step) = changed_at {
        return Err(CliError::DeadSetChanged { trial: seed, step });
    }
    let observed = out.record.status;
    let agrees = matches!(
        (predicted, observed),
        (ReluOutcome::Global, RunStatus::GlobalMin) | (ReluOutcome::NonGlobal, RunStatus::NonglobalStall)
    );
    if !agrees {
        let predicted = match predicted {
            ReluOutcome::Global => "global_min",
            ReluOutcome::NonGlobal => "nonglobal_stall",
        };
        return Err(CliError::PredictionMismatch { trial: seed, predicted, observed: observed.as_str() });
    }
    Ok(Trial { global: observed == RunStatus::GlobalMin, iters: out.record.nonzero_updates })
}

/// Trains `trials` ReLU networks from a `[-c, c]` box initialization on the
/// orthogonal dataset in dimension `d`. Trial `i` uses seed `base_seed + i`.
///
/// Fails on the first trial whose dead set changes during training or whose
/// dead-set prediction disagrees with the training outcome.
pub fn monte_carlo_relu(
    d: usize,
    k: usize,
    c: f64,
    eta: f64,
    trials: usize,
    base_seed: u64,
) -> Result<MonteCarloSummary> {
    monte_carlo_relu_with_order(d, k, c, eta, trials, base_seed, SamplingOrder::UniformWithReplacement)
}

pub fn monte_carlo_relu_with_order(
    d: usize,
    k: usize,
    c: f64,
    eta: f64,
    trials: usize,
    base_seed: u64,
    order: SamplingOrder,
) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    let results: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(d, k, c, eta, order, base_seed.wrapping_add(i)))
        .collect::<Result<_>>()?;
    let global = results.iter().filter(|t| t.global).count();
    let max_iters_when_global = results.iter().filter(|t| t.global).map(|t| t.iters).max().unwrap_or(0);
    Ok(MonteCarloSummary {
        trials,
        frac_global: global as f64 / trials as f64,
        frac_nonglobal: (trials - global) as f64 / trials as f64,
        max_iters_when_global,
    })
}
