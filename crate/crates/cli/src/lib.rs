//! Experiment harness: configuration, orchestration and artifact writers.

pub mod config;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod plot;
pub mod report;

pub use config::{ExperimentConfig, Task};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, Artifacts};
pub use montecarlo::{monte_carlo_relu, MonteCarloSummary};
pub use plot::{emit_svg_plot, Series};
pub use report::{emit_csv, RunMeta};
