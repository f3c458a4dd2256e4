use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use linsep_cli::{run_experiment, ExperimentConfig, Task};

#[derive(Parser)]
#[command(name = "linsep", version, about = "SGD on two-layer networks over linearly separable data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on synthetic (or IDX) data for every k and seed.
    Train(Common),
    /// Evaluate every closed-form bound at the configured inputs.
    Bounds(Common),
    /// Cyclic SGD over the adversarial sequence, checked against the lower bound.
    LowerBoundDemo(Common),
    /// Build ReLU bad local minima and probe their flatness.
    ReluLocalminDemo(Common),
    /// Dead-coordinate Monte Carlo for ReLU on orthogonal data.
    ReluMontecarlo(Common),
    /// Digit 3 vs 5 convergence and test-error curves.
    MnistFig1(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; missing keys take the task defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; run i uses base + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Runs per k.
    #[arg(long)]
    runs: Option<usize>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (task, common) = match cli.command {
        Command::Train(c) => (Task::Train, c),
        Command::Bounds(c) => (Task::Bounds, c),
        Command::LowerBoundDemo(c) => (Task::LowerBoundDemo, c),
        Command::ReluLocalminDemo(c) => (Task::ReluLocalminDemo, c),
        Command::ReluMontecarlo(c) => (Task::ReluMontecarlo, c),
        Command::MnistFig1(c) => (Task::MnistFig1, c),
    };
    let mut config = match &common.config {
        Some(p) => ExperimentConfig::load(p, Some(task))?,
        None => ExperimentConfig::for_task(task),
    };
    if let Some(out) = common.out {
        config.output_dir = out;
    }
    if let Some(seed) = common.seed {
        config.base_seed = seed;
    }
    if let Some(runs) = common.runs {
        config.runs = runs;
    }
    let artifacts = run_experiment(&config).with_context(|| format!("{} failed", task.as_str()))?;
    for f in &artifacts.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
