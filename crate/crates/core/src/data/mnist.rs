use serde::Serialize;

use super::idx::RawMnist;
use crate::error::{invalid, Error, Result};
use crate::rng::seeded_rng;
use crate::types::{norm, Example, LabeledDataset};

/// A two-digit binary task drawn from MNIST.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MnistTask {
    /// Digit labelled `+1`.
    pub digit_pos: u8,
    /// Digit labelled `-1`.
    pub digit_neg: u8,
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
}

impl Default for MnistTask {
    fn default() -> Self {
        Self { digit_pos: 3, digit_neg: 5, n_train: 3000, n_test: 1000, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct MnistSplit {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    /// Largest pixel-vector norm in the selected pool (pixels in `[0, 1]`);
    /// every vector was divided by it.
    pub max_norm: f64,
}

/// Filters to the two digits, draws a seeded subsample of
/// `n_train + n_test` images, scales pixels to `[0, 1]` and then divides by
/// the pool's largest norm so every `‖x‖ ≤ 1`.
pub fn build_mnist_task(raw: &RawMnist, task: &MnistTask) -> Result<MnistSplit> {
    if task.digit_pos == task.digit_neg {
        return Err(invalid("the two digits must differ"));
    }
    if task.n_train == 0 || task.n_test == 0 {
        return Err(invalid("train and test sizes must be positive"));
    }
    let mut pool: Vec<usize> = raw
        .labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == task.digit_pos || l == task.digit_neg)
        .map(|(i, _)| i)
        .collect();
    let needed = task.n_train + task.n_test;
    if pool.len() < needed {
        return Err(Error::InsufficientExamples { needed, available: pool.len() });
    }
    let mut rng = seeded_rng(task.seed);
    rng.shuffle(&mut pool);
    pool.truncate(needed);

    let vectors: Vec<Vec<f64>> = pool
        .iter()
        .map(|&i| raw.images.image(i).iter().map(|&p| p as f64 / 255.0).collect())
        .collect();
    let max_norm = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if max_norm == 0.0 {
        return Err(invalid("every selected image is blank"));
    }
    let mut examples = Vec::with_capacity(needed);
    for (v, &i) in vectors.into_iter().zip(&pool) {
        let y = if raw.labels[i] == task.digit_pos { 1.0 } else { -1.0 };
        examples.push(Example::new(v.into_iter().map(|p| p / max_norm).collect(), y)?);
    }
    let test = examples.split_off(task.n_train);
    Ok(MnistSplit {
        train: LabeledDataset::new(examples, None)?,
        test: LabeledDataset::new(test, None)?,
        max_norm,
    })
}
