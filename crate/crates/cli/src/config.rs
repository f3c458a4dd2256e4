//! Experiment configuration.
//!
//! A config file is TOML. Every key is optional; missing keys fall back to the
//! defaults of the selected task, so a file only needs to list what it
//! changes. See the README for the full key list.

use std::path::{Path, PathBuf};

use linsep_core::trainer::InitScheme;
use linsep_core::{Activation, SamplingOrder};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Train,
    Bounds,
    LowerBoundDemo,
    ReluLocalminDemo,
    ReluMontecarlo,
    MnistFig1,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Train => "train",
            Task::Bounds => "bounds",
            Task::LowerBoundDemo => "lower-bound-demo",
            Task::ReluLocalminDemo => "relu-localmin-demo",
            Task::ReluMontecarlo => "relu-montecarlo",
            Task::MnistFig1 => "mnist-fig1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Synthetic,
    Mnist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub kind: DatasetKind,
    /// Input dimension (synthetic only).
    pub d: usize,
    /// Training set size.
    pub n: usize,
    /// Test set size; 0 disables the test set for synthetic data.
    pub n_test: usize,
    /// Separator norm (synthetic only).
    pub norm_wstar: f64,
    pub images: PathBuf,
    pub labels: PathBuf,
    pub digit_pos: u8,
    pub digit_neg: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    LeakyRelu,
    Relu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// `R = v = 1/√(2k)`.
    Default,
    BoundedRows,
    SymmetricBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainerConfig {
    pub k: Vec<usize>,
    pub eta: f64,
    pub alpha: f64,
    pub activation: ActivationKind,
    pub init: InitKind,
    /// Row radius for `bounded_rows`.
    pub init_r: f64,
    /// Second-layer scale for `bounded_rows`.
    pub init_v: f64,
    /// Box half-width for `symmetric_box`.
    pub init_c: f64,
    pub order: SamplingOrder,
    pub max_epochs: usize,
    pub record_trajectory: bool,
}

impl TrainerConfig {
    pub fn activation(&self) -> Result<Activation> {
        match self.activation {
            ActivationKind::LeakyRelu => Ok(Activation::leaky_relu(self.alpha)?),
            ActivationKind::Relu => Ok(Activation::Relu),
        }
    }

    pub fn init_scheme(&self) -> InitScheme {
        match self.init {
            InitKind::Default => InitScheme::Default,
            InitKind::BoundedRows => InitScheme::BoundedRows { r: self.init_r, v: self.init_v },
            InitKind::SymmetricBox => InitScheme::SymmetricBox { c: self.init_c },
        }
    }
}

/// Inputs for the `bounds` task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub norm_wstar: f64,
    pub alpha: f64,
    pub eta: f64,
    pub k: usize,
    pub v: f64,
    pub r: f64,
    pub n: u64,
    pub delta: f64,
    pub c_k: u64,
    pub l_v: f64,
    pub d: usize,
    pub c: f64,
    pub relu_eta: f64,
}

/// Grid for the `lower-bound-demo` task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundConfig {
    pub d: Vec<usize>,
    pub eta: Vec<f64>,
    pub k: Vec<usize>,
    pub alpha: f64,
    pub max_epochs: usize,
}

/// Settings for the ReLU tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReluConfig {
    /// Orthogonal-data dimension for `relu-montecarlo`.
    pub d: usize,
    pub k: Vec<usize>,
    pub c: f64,
    pub eta: f64,
    pub trials: usize,
    pub delta: f64,
    /// Dataset shape for `relu-localmin-demo`.
    pub localmin_d: usize,
    pub localmin_n: usize,
    pub localmin_k: usize,
    pub localmin_norm_wstar: f64,
    pub perturbations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub runs: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub dataset: DatasetConfig,
    pub trainer: TrainerConfig,
    pub bounds: BoundsConfig,
    pub lower_bound: LowerBoundConfig,
    pub relu: ReluConfig,
}

impl ExperimentConfig {
    /// Defaults for `task`.
    pub fn for_task(task: Task) -> Self {
        let mut c = Self {
            task,
            runs: 10,
            base_seed: 0,
            output_dir: PathBuf::from("out"),
            dataset: DatasetConfig {
                kind: DatasetKind::Synthetic,
                d: 20,
                n: 500,
                n_test: 500,
                norm_wstar: 2.0,
                images: PathBuf::from("data/mnist/train-images-idx3-ubyte"),
                labels: PathBuf::from("data/mnist/train-labels-idx1-ubyte"),
                digit_pos: 3,
                digit_neg: 5,
            },
            trainer: TrainerConfig {
                k: vec![5, 50, 500],
                eta: 0.1,
                alpha: 0.25,
                activation: ActivationKind::LeakyRelu,
                init: InitKind::Default,
                init_r: 0.5,
                init_v: 0.5,
                init_c: 1.0,
                order: SamplingOrder::UniformWithReplacement,
                max_epochs: 10_000,
                record_trajectory: false,
            },
            bounds: BoundsConfig {
                norm_wstar: 1.0,
                alpha: 0.5,
                eta: 1.0,
                k: 2,
                v: 0.5,
                r: 0.5,
                n: 3000,
                delta: 0.05,
                c_k: 10,
                l_v: 0.0,
                d: 32,
                c: 1.0,
                relu_eta: 0.5,
            },
            lower_bound: LowerBoundConfig {
                d: vec![4, 16, 64],
                eta: vec![0.1, 1.0, 10.0],
                k: vec![2, 8],
                alpha: 0.25,
                max_epochs: 1_000_000,
            },
            relu: ReluConfig {
                d: 32,
                k: vec![1, 2, 3, 4, 6, 8, 10, 12],
                c: 1.0,
                eta: 0.5,
                trials: 5000,
                delta: 0.05,
                localmin_d: 10,
                localmin_n: 40,
                localmin_k: 3,
                localmin_norm_wstar: 3.0,
                perturbations: 1000,
            },
        };
        match task {
            Task::MnistFig1 => {
                c.runs = 40;
                c.dataset.kind = DatasetKind::Mnist;
                c.dataset.n = 3000;
                c.dataset.n_test = 1000;
                c.trainer.k = vec![10, 100, 1000];
                c.trainer.eta = 0.01;
                c.trainer.alpha = 0.01;
                c.trainer.max_epochs = 500;
            }
            Task::ReluLocalminDemo => c.runs = 50,
            Task::Bounds | Task::LowerBoundDemo | Task::ReluMontecarlo => c.runs = 1,
            Task::Train => {}
        }
        c
    }

    /// Parses TOML text over the defaults of its task. `task` overrides the
    /// file's `task` key.
    pub fn from_toml_str(text: &str, task: Option<Task>) -> std::result::Result<Self, String> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| e.message().to_string())?;
        let task = match task {
            Some(t) => t,
            None => match user.get("task") {
                Some(v) => v.clone().try_into().map_err(|e: toml::de::Error| e.message().to_string())?,
                None => Task::Train,
            },
        };
        let mut base = toml::Table::try_from(Self::for_task(task)).map_err(|e| e.to_string())?;
        merge(&mut base, user);
        base.insert("task".into(), toml::Value::String(task.as_str().into()));
        base.try_into().map_err(|e: toml::de::Error| e.message().to_string())
    }

    pub fn load(path: &Path, task: Option<Task>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let config = Self::from_toml_str(&text, task)
            .map_err(|message| CliError::Parse { path: path.to_path_buf(), message })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if self.runs == 0 {
            return bad("runs must be at least 1");
        }
        if self.trainer.k.is_empty() || self.trainer.k.contains(&0) {
            return bad("trainer.k must be a nonempty list of positive integers");
        }
        if !(self.trainer.eta > 0.0 && self.trainer.eta.is_finite()) {
            return bad("trainer.eta must be positive");
        }
        if self.trainer.max_epochs == 0 {
            return bad("trainer.max_epochs must be at least 1");
        }
        if self.trainer.record_trajectory && self.dataset.kind == DatasetKind::Mnist {
            return bad("trajectory recording needs a known separator, which MNIST data lacks");
        }
        if self.dataset.n == 0 {
            return bad("dataset.n must be at least 1");
        }
        if self.lower_bound.d.is_empty() || self.lower_bound.eta.is_empty() || self.lower_bound.k.is_empty() {
            return bad("lower_bound grids must be nonempty");
        }
        if self.relu.k.is_empty() || self.relu.trials == 0 {
            return bad("relu.k must be nonempty and relu.trials at least 1");
        }
        self.trainer.activation()?;
        Ok(())
    }
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (key, value) in user {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}
