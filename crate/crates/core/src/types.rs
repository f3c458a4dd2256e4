//! Domain types shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Slack on the `‖x‖ ≤ 1` domain constraint.
pub const NORM_SLACK: f64 = 1e-12;
/// Slack on the `y⟨w*, x⟩ ≥ 1` separator constraint.
pub const MARGIN_SLACK: f64 = 1e-9;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // independent accumulators let the loop vectorize
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    let mut acc = [0.0; 8];
    for (p, q) in ca.zip(cb) {
        for i in 0..8 {
            acc[i] += p[i] * q[i];
        }
    }
    acc.iter().sum::<f64>() + tail
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A labelled point `(x, y)` with `‖x‖ ≤ 1` and `y ∈ {-1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    x: Vec<f64>,
    y: f64,
}

impl Example {
    pub fn new(x: Vec<f64>, y: f64) -> Result<Self> {
        if y != 1.0 && y != -1.0 {
            return Err(Error::InvalidExample(format!("label must be +1 or -1, got {y}")));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidExample("non-finite feature".into()));
        }
        let n = norm(&x);
        if n > 1.0 + NORM_SLACK {
            return Err(Error::InvalidExample(format!("‖x‖ = {n} exceeds 1")));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// An ordered training or test set, optionally carrying a unit-margin separator.
///
/// Insertion order is preserved; cyclic SGD visits examples in this order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    examples: Vec<Example>,
    separator: Option<Vec<f64>>,
    dim: usize,
}

impl LabeledDataset {
    /// Builds a dataset. Fails on mixed dimensions, on an empty list, or when
    /// the separator misses the unit margin on some example.
    pub fn new(examples: Vec<Example>, separator: Option<Vec<f64>>) -> Result<Self> {
        let first = examples.first().ok_or(Error::EmptyDataset)?;
        let dim = first.dim();
        for ex in &examples {
            if ex.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: ex.dim() });
            }
        }
        if let Some(w) = &separator {
            if w.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: w.len() });
            }
            for (index, ex) in examples.iter().enumerate() {
                let margin = ex.y * dot(w, &ex.x);
                if margin < 1.0 - MARGIN_SLACK {
                    return Err(Error::MarginViolation { index, margin });
                }
            }
        }
        Ok(Self { examples, separator, dim })
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn separator(&self) -> Option<&[f64]> {
        self.separator.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Returns a copy carrying `separator`, validating the margin.
    pub fn with_separator(self, separator: Vec<f64>) -> Result<Self> {
        Self::new(self.examples, Some(separator))
    }
}

/// Hidden-unit nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    /// `σ(z) = max(αz, z)` with `0 < α < 1`.
    LeakyRelu { alpha: f64 },
    /// `σ(z) = max(0, z)`.
    Relu,
}

impl Activation {
    pub fn leaky_relu(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("leaky relu slope must lie in (0, 1), got {alpha}")));
        }
        Ok(Activation::LeakyRelu { alpha })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Activation::LeakyRelu { alpha } => Activation::leaky_relu(alpha).map(|_| ()),
            Activation::Relu => Ok(()),
        }
    }

    /// Negative-side slope: `α` for Leaky ReLU, `0` for ReLU.
    pub fn negative_slope(&self) -> f64 {
        match *self {
            Activation::LeakyRelu { alpha } => alpha,
            Activation::Relu => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Activation::LeakyRelu { .. } => "leaky_relu",
            Activation::Relu => "relu",
        }
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, scale: f64, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn scaled(&self, scale: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * scale).collect(),
        }
    }
}

/// First-layer weights `W` (2k × d) and the fixed second layer `(v,…,v, −v,…,−v)`.
///
/// Rows `0..k` are the positive-side neurons `w⁽ⁱ⁾`, rows `k..2k` the
/// negative-side neurons `u⁽ⁱ⁾`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    weights: Matrix,
    v: f64,
    activation: Activation,
}

impl NetworkParams {
    pub fn new(weights: Matrix, v: f64, activation: Activation) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(format!("second-layer scale v must be positive, got {v}")));
        }
        if weights.rows() == 0 || !weights.rows().is_multiple_of(2) {
            return Err(invalid(format!(
                "weight matrix needs an even, positive number of rows, got {}",
                weights.rows()
            )));
        }
        if weights.cols() == 0 {
            return Err(invalid("weight matrix has no columns"));
        }
        activation.validate()?;
        Ok(Self { weights, v, activation })
    }

    pub fn zeros(k: usize, d: usize, v: f64, activation: Activation) -> Result<Self> {
        Self::new(Matrix::zeros(2 * k, d), v, activation)
    }

    /// Number of neurons on each side; the hidden layer has `2k` units.
    pub fn k(&self) -> usize {
        self.weights.rows() / 2
    }

    pub fn dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut Matrix {
        &mut self.weights
    }

    /// Positive-side row `w⁽ⁱ⁾`, `i < k`.
    pub fn w_row(&self, i: usize) -> &[f64] {
        self.weights.row(i)
    }

    /// Negative-side row `u⁽ⁱ⁾`, `i < k`.
    pub fn u_row(&self, i: usize) -> &[f64] {
        self.weights.row(self.k() + i)
    }

    /// Same architecture with different weights.
    pub fn with_weights(&self, weights: Matrix) -> Result<Self> {
        if (weights.rows(), weights.cols()) != (self.weights.rows(), self.weights.cols()) {
            return Err(Error::DimensionMismatch {
                expected: self.weights.rows() * self.weights.cols(),
                found: weights.rows() * weights.cols(),
            });
        }
        Self::new(weights, self.v, self.activation)
    }
}

/// How SGD draws the next example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingOrder {
    /// Independent uniform draws with replacement.
    UniformWithReplacement,
    /// Dataset order, repeated.
    Cyclic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub eta: f64,
    /// One epoch is `n` SGD steps followed by a full convergence sweep.
    pub max_epochs: usize,
    pub order: SamplingOrder,
    pub seed: u64,
    pub margin_tol: f64,
    /// Record `(F, G, cosine)` after every non-zero update. Needs a separator.
    pub record_trajectory: bool,
}

impl TrainConfig {
    pub fn new(eta: f64) -> Self {
        Self {
            eta,
            max_epochs: 10_000,
            order: SamplingOrder::UniformWithReplacement,
            seed: 0,
            margin_tol: 1e-9,
            record_trajectory: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_order(mut self, order: SamplingOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_max_epochs(mut self, max_epochs: usize) -> Self {
        self.max_epochs = max_epochs;
        self
    }

    pub fn with_trajectory(mut self, on: bool) -> Self {
        self.record_trajectory = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(invalid(format!("learning rate must be positive, got {}", self.eta)));
        }
        if self.max_epochs == 0 {
            return Err(invalid("max_epochs must be positive"));
        }
        if !(self.margin_tol >= 0.0) {
            return Err(invalid(format!("margin_tol must be non-negative, got {}", self.margin_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// A full sweep found every training margin at least `1 - margin_tol`.
    GlobalMin,
    /// A full sweep made no non-zero update yet some margin is below one.
    NonglobalStall,
    EpochLimit,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::GlobalMin => "global_min",
            RunStatus::NonglobalStall => "nonglobal_stall",
            RunStatus::EpochLimit => "epoch_limit",
        }
    }
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Statistics of the convergence sweep at the end of an epoch (epoch 0 is the
/// initialization).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub hinge_loss: f64,
    pub train_error: f64,
    pub test_error: Option<f64>,
    /// Cumulative non-zero updates at the end of this epoch.
    pub nonzero_updates: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    /// Number of non-zero updates performed so far.
    pub t: u64,
    /// `⟨vec(W), vec(W*)⟩` with `W* = (w*,…,w*, −w*,…,−w*)`.
    pub f: f64,
    /// `‖W‖_F`.
    pub g: f64,
    pub cosine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub nonzero_updates: u64,
    /// All SGD steps taken, zero updates included.
    pub total_steps: u64,
    pub status: RunStatus,
    pub epoch_stats: Vec<EpochStats>,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

impl RunRecord {
    /// Training epochs run (the initial sweep is not counted).
    pub fn epochs(&self) -> usize {
        self.epoch_stats.last().map_or(0, |s| s.epoch)
    }

    pub fn final_stats(&self) -> &EpochStats {
        self.epoch_stats.last().expect("a run always records the initial sweep")
    }
}
