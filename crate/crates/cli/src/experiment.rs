//! Task dispatch: data loading, parallel runs, aggregation and artifacts.

use std::path::{Path, PathBuf};

use linsep_core::bounds::{lower_bound_terms, BoundReport, UpdateBoundInputs};
use linsep_core::constructions::{adversarial_init, adversarial_sequence, relu_bad_local_min};
use linsep_core::data::{build_mnist_task, estimate_separator, generate_separable, load_idx, MnistTask, SeparableSpec};
use linsep_core::network::{full_batch_subgradient, hinge_loss};
use linsep_core::trainer::{default_scale, initialize, train};
use linsep_core::types::norm;
use linsep_core::{seeded_rng, Activation, LabeledDataset, Matrix, RunRecord, RunStatus, SamplingOrder, TrainConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ActivationKind, DatasetKind, ExperimentConfig, Task};
use crate::error::{io_err, CliError, Result};
use crate::montecarlo::{monte_carlo_relu_with_order, train_seed, MonteCarloSummary};
use crate::plot::{emit_svg_plot, Series};
use crate::report::{emit_csv, write_json, MeanStd, RunMeta};

/// Confidence used for the generalization bounds in training summaries.
pub const SUMMARY_DELTA: f64 = 0.05;
const PERCEPTRON_PASSES: usize = 1000;
const HYPERPARAMETER_NOTE: &str =
    "eta and alpha are defaults chosen by this tool, not values taken from the original experiment";
const SUBSAMPLE_NOTE: &str =
    "the train/test images are a seeded subsample of the IDX files; the original selection procedure is unknown";

/// Files written by a task.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Training data shared by every run of a task.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: LabeledDataset,
    pub test: Option<LabeledDataset>,
    /// Norm of a unit-margin separator and where it came from.
    pub norm_wstar: Option<f64>,
    pub separator_source: Option<&'static str>,
}

/// Runs the configured task and writes its artifacts under `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Artifacts> {
    config.validate()?;
    preflight(config)?;
    let dir = config.output_dir.clone();
    let files = match config.task {
        Task::Train | Task::MnistFig1 => run_training_task(config, &dir)?,
        Task::Bounds => run_bounds_task(config, &dir)?,
        Task::LowerBoundDemo => run_lower_bound_task(config, &dir)?,
        Task::ReluLocalminDemo => run_localmin_task(config, &dir)?,
        Task::ReluMontecarlo => run_montecarlo_task(config, &dir)?,
    };
    Ok(Artifacts { output_dir: dir, files })
}

fn uses_dataset(config: &ExperimentConfig) -> bool {
    matches!(config.task, Task::Train | Task::MnistFig1)
}

/// Checks data files and the output directory before any run starts.
fn preflight(config: &ExperimentConfig) -> Result<()> {
    if uses_dataset(config) && config.dataset.kind == DatasetKind::Mnist {
        for p in [&config.dataset.images, &config.dataset.labels] {
            if !p.is_file() {
                return Err(CliError::MissingData(p.clone()));
            }
        }
    }
    let dir = &config.output_dir;
    let unwritable = |source| CliError::Unwritable { path: dir.clone(), source };
    std::fs::create_dir_all(dir).map_err(unwritable)?;
    let probe = dir.join(".linsep-write-probe");
    std::fs::write(&probe, b"").map_err(unwritable)?;
    std::fs::remove_file(&probe).map_err(unwritable)?;
    Ok(())
}

/// Loads or generates the dataset of a training task.
pub fn prepare_data(config: &ExperimentConfig) -> Result<PreparedData> {
    let ds = &config.dataset;
    match ds.kind {
        DatasetKind::Synthetic => {
            let all = generate_separable(&SeparableSpec {
                d: ds.d,
                n: ds.n + ds.n_test,
                norm_wstar: ds.norm_wstar,
                seed: config.base_seed,
            })?;
            let wstar = all.separator().map(<[f64]>::to_vec);
            let (train, test) = all.examples().split_at(ds.n);
            let train = LabeledDataset::new(train.to_vec(), wstar.clone())?;
            let test = if test.is_empty() { None } else { Some(LabeledDataset::new(test.to_vec(), wstar.clone())?) };
            Ok(PreparedData {
                train,
                test,
                norm_wstar: wstar.as_deref().map(norm),
                separator_source: Some("generator"),
            })
        }
        DatasetKind::Mnist => {
            let raw = load_idx(&ds.images, &ds.labels)?;
            let task = MnistTask {
                digit_pos: ds.digit_pos,
                digit_neg: ds.digit_neg,
                n_train: ds.n,
                n_test: ds.n_test,
                seed: config.base_seed,
            };
            let split = build_mnist_task(&raw, &task)?;
            let found = estimate_separator(&split.train, PERCEPTRON_PASSES).ok();
            let norm_wstar = found.as_deref().map(norm);
            let train = match found {
                Some(w) => split.train.with_separator(w)?,
                None => split.train,
            };
            Ok(PreparedData {
                train,
                test: Some(split.test),
                norm_wstar,
                separator_source: norm_wstar.map(|_| "perceptron"),
            })
        }
    }
}

/// `(k, seed)` of run `run_id`: runs are numbered k-major, and run `i` is
/// seeded with `base_seed + i`.
pub fn run_plan(config: &ExperimentConfig) -> Vec<(u64, usize, u64)> {
    let mut plan = Vec::new();
    for (ki, &k) in config.trainer.k.iter().enumerate() {
        for r in 0..config.runs {
            let run_id = (ki * config.runs + r) as u64;
            plan.push((run_id, k, config.base_seed.wrapping_add(run_id)));
        }
    }
    plan
}

fn alpha_of(activation: Activation) -> f64 {
    match activation {
        Activation::LeakyRelu { alpha } => alpha,
        Activation::Relu => 0.0,
    }
}

/// One training run, reproducible from `(config, data, k, seed)` alone.
pub fn run_single(config: &ExperimentConfig, data: &PreparedData, run_id: u64, k: usize, seed: u64) -> Result<RunMeta> {
    let t = &config.trainer;
    let activation = t.activation()?;
    let params = initialize(&t.init_scheme(), k, data.train.dim(), activation, &mut seeded_rng(seed))?;
    let train_config = TrainConfig::new(t.eta)
        .with_seed(train_seed(seed))
        .with_order(t.order)
        .with_max_epochs(t.max_epochs)
        .with_trajectory(t.record_trajectory);
    let record = train(params, &data.train, &train_config, data.test.as_ref())?;
    Ok(RunMeta {
        run_id,
        seed,
        k,
        eta: t.eta,
        alpha: alpha_of(activation),
        activation: activation.name().to_string(),
        record,
    })
}

/// Re-runs a single row of a training task.
pub fn reproduce_run(config: &ExperimentConfig, run_id: u64) -> Result<RunMeta> {
    config.validate()?;
    let (_, k, seed) = run_plan(config)
        .into_iter()
        .find(|r| r.0 == run_id)
        .ok_or_else(|| CliError::Config(format!("run {run_id} is not part of this experiment")))?;
    run_single(config, &prepare_data(config)?, run_id, k, seed)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct StatusCounts {
    pub global_min: usize,
    pub nonglobal_stall: usize,
    pub epoch_limit: usize,
}

impl StatusCounts {
    fn of<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> Self {
        let mut c = Self::default();
        for r in records {
            match r.status {
                RunStatus::GlobalMin => c.global_min += 1,
                RunStatus::NonglobalStall => c.nonglobal_stall += 1,
                RunStatus::EpochLimit => c.epoch_limit += 1,
            }
        }
        c
    }
}

/// Extremes of the per-update changes of the potentials `F` and `G²` and of the
/// cosine, over all runs with a recorded trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub min_delta_f: Option<f64>,
    pub max_delta_g_squared: Option<f64>,
    pub max_cosine: f64,
    /// `2kηvα`.
    pub delta_f_floor: f64,
    /// `2η + 2kη²v²`.
    pub delta_g_squared_cap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KSummary {
    pub k: usize,
    pub runs: usize,
    pub status: StatusCounts,
    pub nonzero_updates: MeanStd,
    pub max_nonzero_updates: u64,
    pub epochs: MeanStd,
    pub final_train_loss: MeanStd,
    pub final_train_err: MeanStd,
    pub final_test_err: Option<MeanStd>,
    /// Every run's update count is at most `⌈M_k⌉`, when `M_k` applies.
    pub within_update_cap: Option<bool>,
    pub bounds: Vec<BoundReport>,
    pub trajectory: Option<TrajectorySummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetSummary {
    pub n_train: usize,
    pub n_test: usize,
    pub d: usize,
    pub norm_wstar: Option<f64>,
    pub separator_source: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainingSummary {
    pub task: &'static str,
    pub notes: Vec<&'static str>,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub per_k: Vec<KSummary>,
}

/// Inputs for the update-count bounds at width `k`, when they apply.
pub fn update_bound_inputs(config: &ExperimentConfig, norm_wstar: Option<f64>, k: usize) -> Option<UpdateBoundInputs> {
    let t = &config.trainer;
    if t.activation != ActivationKind::LeakyRelu {
        return None;
    }
    let r = t.init_scheme().row_radius(k)?;
    Some(UpdateBoundInputs { norm_wstar: norm_wstar?, alpha: t.alpha, eta: t.eta, k, v: t.init_scheme().second_layer(k), r })
}

fn trajectory_summary(runs: &[&RunMeta], k: usize, config: &ExperimentConfig) -> Option<TrajectorySummary> {
    let t = &config.trainer;
    let v = t.init_scheme().second_layer(k);
    let (kf, eta) = (k as f64, t.eta);
    let mut out = TrajectorySummary {
        min_delta_f: None,
        max_delta_g_squared: None,
        max_cosine: f64::NEG_INFINITY,
        delta_f_floor: 2.0 * kf * eta * v * alpha_of(t.activation().ok()?),
        delta_g_squared_cap: 2.0 * eta + 2.0 * kf * eta * eta * v * v,
    };
    let mut any = false;
    for r in runs {
        let traj = r.record.trajectory.as_ref()?;
        any = true;
        for p in traj {
            out.max_cosine = out.max_cosine.max(p.cosine);
        }
        for w in traj.windows(2) {
            let df = w[1].f - w[0].f;
            let dg = w[1].g * w[1].g - w[0].g * w[0].g;
            out.min_delta_f = Some(out.min_delta_f.map_or(df, |m| m.min(df)));
            out.max_delta_g_squared = Some(out.max_delta_g_squared.map_or(dg, |m| m.max(dg)));
        }
    }
    any.then_some(out)
}

fn summarize_k(config: &ExperimentConfig, data: &PreparedData, k: usize, runs: &[&RunMeta]) -> Result<KSummary> {
    let stat = |f: &dyn Fn(&RunMeta) -> f64| MeanStd::of(runs.iter().map(|r| f(r))).expect("at least one run");
    let max_updates = runs.iter().map(|r| r.record.nonzero_updates).max().unwrap_or(0);
    let n = data.train.len() as u64;
    let mut bounds = Vec::new();
    let mut within = None;
    if let Some(p) = update_bound_inputs(config, data.norm_wstar, k) {
        if let Ok(mk) = BoundReport::max_updates(&p) {
            within = Some(runs.iter().all(|r| r.record.nonzero_updates <= mk.value.ceil() as u64));
            bounds.push(mk);
        }
        bounds.push(BoundReport::lower_bound(&p)?);
        if let Ok(g) = BoundReport::generalization(&p, n, SUMMARY_DELTA) {
            bounds.push(g);
        }
    }
    let all_global = runs.iter().all(|r| r.record.status == RunStatus::GlobalMin);
    if all_global {
        if let Ok(c) = BoundReport::compression(max_updates, n, SUMMARY_DELTA, 0.0) {
            bounds.push(c);
        }
    }
    let final_test_err = if runs.iter().all(|r| r.record.final_stats().test_error.is_some()) {
        MeanStd::of(runs.iter().filter_map(|r| r.record.final_stats().test_error))
    } else {
        None
    };
    Ok(KSummary {
        k,
        runs: runs.len(),
        status: StatusCounts::of(runs.iter().map(|r| &r.record)),
        nonzero_updates: stat(&|r| r.record.nonzero_updates as f64),
        max_nonzero_updates: max_updates,
        epochs: stat(&|r| r.record.epochs() as f64),
        final_train_loss: stat(&|r| r.record.final_stats().hinge_loss),
        final_train_err: stat(&|r| r.record.final_stats().train_error),
        final_test_err,
        within_update_cap: within,
        bounds,
        trajectory: trajectory_summary(runs, k, config),
    })
}

/// Mean, min and max of a per-epoch quantity across runs; runs that stopped
/// early hold their final value.
fn curve_series(runs: &[&RunMeta], metric: impl Fn(&linsep_core::EpochStats) -> Option<f64>) -> Option<Vec<Series>> {
    let len = runs.iter().map(|r| r.record.epoch_stats.len()).max()?;
    let mut mean = Vec::with_capacity(len);
    let mut lo = Vec::with_capacity(len);
    let mut hi = Vec::with_capacity(len);
    for e in 0..len {
        let vals: Vec<f64> = runs
            .iter()
            .map(|r| {
                let s = &r.record.epoch_stats;
                metric(&s[e.min(s.len() - 1)])
            })
            .collect::<Option<_>>()?;
        let x = e as f64;
        mean.push((x, vals.iter().sum::<f64>() / vals.len() as f64));
        lo.push((x, vals.iter().cloned().fold(f64::INFINITY, f64::min)));
        hi.push((x, vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)));
    }
    Some(vec![Series::new("mean", mean), Series::new("min", lo), Series::new("max", hi)])
}

fn run_training_task(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let data = prepare_data(config)?;
    let plan = run_plan(config);
    let mut runs: Vec<RunMeta> = plan
        .par_iter()
        .map(|&(run_id, k, seed)| run_single(config, &data, run_id, k, seed))
        .collect::<Result<_>>()?;
    runs.sort_by_key(|r| r.run_id);

    let mut files = Vec::new();
    let csv_path = dir.join("runs.csv");
    emit_csv(&csv_path, &runs)?;
    files.push(csv_path);

    let mut per_k = Vec::new();
    let mut loss_overview = Vec::new();
    let mut test_overview = Vec::new();
    for &k in &config.trainer.k {
        let group: Vec<&RunMeta> = runs.iter().filter(|r| r.k == k).collect();
        per_k.push(summarize_k(config, &data, k, &group)?);
        if let Some(s) = curve_series(&group, |e| Some(e.hinge_loss)) {
            let p = dir.join(format!("train_loss_k{k}.svg"));
            emit_svg_plot(&p, &s, &format!("Train hinge loss, k = {k}"), "epoch", "train loss")?;
            files.push(p);
            loss_overview.push(Series::new(format!("k = {k}"), s[0].points.clone()));
        }
        if let Some(s) = curve_series(&group, |e| e.test_error) {
            let p = dir.join(format!("test_error_k{k}.svg"));
            emit_svg_plot(&p, &s, &format!("Test 0-1 error, k = {k}"), "epoch", "test error")?;
            files.push(p);
            test_overview.push(Series::new(format!("k = {k}"), s[0].points.clone()));
        }
    }
    if !loss_overview.is_empty() {
        let p = dir.join("train_loss.svg");
        emit_svg_plot(&p, &loss_overview, "Mean train hinge loss", "epoch", "train loss")?;
        files.push(p);
    }
    if !test_overview.is_empty() {
        let p = dir.join("test_error.svg");
        emit_svg_plot(&p, &test_overview, "Mean test 0-1 error", "epoch", "test error")?;
        files.push(p);
    }

    let mut notes = Vec::new();
    if config.task == Task::MnistFig1 {
        notes.push(HYPERPARAMETER_NOTE);
    }
    if config.dataset.kind == DatasetKind::Mnist {
        notes.push(SUBSAMPLE_NOTE);
    }
    let summary = TrainingSummary {
        task: config.task.as_str(),
        notes,
        config: config.clone(),
        dataset: DatasetSummary {
            n_train: data.train.len(),
            n_test: data.test.as_ref().map_or(0, |t| t.len()),
            d: data.train.dim(),
            norm_wstar: data.norm_wstar,
            separator_source: data.separator_source,
        },
        per_k,
    };
    let p = dir.join("summary.json");
    write_json(&p, &summary)?;
    files.push(p);
    Ok(files)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsSummary {
    pub task: &'static str,
    pub bounds: Vec<BoundReport>,
}

/// Every bound evaluated at the configured inputs.
pub fn evaluate_bounds(config: &ExperimentConfig) -> Result<Vec<BoundReport>> {
    let b = &config.bounds;
    let p = UpdateBoundInputs { norm_wstar: b.norm_wstar, alpha: b.alpha, eta: b.eta, k: b.k, v: b.v, r: b.r };
    let mut out = vec![
        BoundReport::max_updates(&p)?,
        BoundReport::lower_bound(&p)?,
        BoundReport::compression(b.c_k, b.n, b.delta, b.l_v)?,
        BoundReport::generalization(&p, b.n, b.delta)?,
    ];
    out.extend(BoundReport::relu_thresholds(b.d, b.delta)?);
    out.push(BoundReport::relu_iterations(b.d, b.c, b.relu_eta)?);
    Ok(out)
}

fn run_bounds_task(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let summary = BoundsSummary { task: config.task.as_str(), bounds: evaluate_bounds(config)? };
    let p = dir.join("summary.json");
    write_json(&p, &summary)?;
    Ok(vec![p])
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundCase {
    pub run_id: u64,
    pub d: usize,
    pub eta: f64,
    pub k: usize,
    pub nonzero_updates: u64,
    pub status: RunStatus,
    pub b1: f64,
    pub b2: f64,
    pub bound: BoundReport,
    /// Updates at least the bound and at least `d`.
    pub satisfied: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundSummary {
    pub task: &'static str,
    pub alpha: f64,
    pub all_satisfied: bool,
    pub cases: Vec<LowerBoundCase>,
}

/// Cyclic SGD over the adversarial sequence from the adversarial start.
pub fn adversarial_run(d: usize, eta: f64, k: usize, alpha: f64, max_epochs: usize) -> Result<RunRecord> {
    let s = default_scale(k);
    let data = adversarial_sequence(d)?;
    let params = adversarial_init(k, d, s, s, Activation::leaky_relu(alpha)?)?;
    let config = TrainConfig::new(eta).with_order(SamplingOrder::Cyclic).with_max_epochs(max_epochs);
    Ok(train(params, &data, &config, None)?)
}

fn run_lower_bound_task(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let lb = &config.lower_bound;
    let mut grid = Vec::new();
    for &d in &lb.d {
        for &eta in &lb.eta {
            for &k in &lb.k {
                grid.push((grid.len() as u64, d, eta, k));
            }
        }
    }
    let results: Vec<(LowerBoundCase, RunMeta)> = grid
        .par_iter()
        .map(|&(run_id, d, eta, k)| {
            let record = adversarial_run(d, eta, k, lb.alpha, lb.max_epochs)?;
            let p = UpdateBoundInputs::default_init((d as f64).sqrt(), lb.alpha, eta, k);
            let terms = lower_bound_terms(&p)?;
            let n = record.nonzero_updates;
            let case = LowerBoundCase {
                run_id,
                d,
                eta,
                k,
                nonzero_updates: n,
                status: record.status,
                b1: terms.b1,
                b2: terms.b2,
                bound: BoundReport::lower_bound(&p)?,
                satisfied: record.status == RunStatus::GlobalMin && n as f64 >= terms.value && n >= d as u64,
            };
            let meta = RunMeta {
                run_id,
                seed: config.base_seed,
                k,
                eta,
                alpha: lb.alpha,
                activation: "leaky_relu".into(),
                record,
            };
            Ok((case, meta))
        })
        .collect::<Result<_>>()?;
    let (cases, metas): (Vec<_>, Vec<_>) = results.into_iter().unzip();

    let mut files = Vec::new();
    let csv_path = dir.join("runs.csv");
    emit_csv(&csv_path, &metas)?;
    files.push(csv_path);

    let mut series = Vec::new();
    for &eta in &lb.eta {
        for &k in &lb.k {
            let pts: Vec<(f64, f64)> = cases
                .iter()
                .filter(|c| c.eta == eta && c.k == k)
                .map(|c| (c.d as f64, c.nonzero_updates as f64 / c.bound.value))
                .collect();
            series.push(Series::new(format!("eta = {eta}, k = {k}"), pts));
        }
    }
    let p = dir.join("lower_bound.svg");
    emit_svg_plot(&p, &series, "Non-zero updates / lower bound", "d", "ratio")?;
    files.push(p);

    let summary = LowerBoundSummary {
        task: config.task.as_str(),
        alpha: lb.alpha,
        all_satisfied: cases.iter().all(|c| c.satisfied),
        cases,
    };
    let p = dir.join("summary.json");
    write_json(&p, &summary)?;
    files.push(p);
    Ok(files)
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalMinInstance {
    pub seed: u64,
    pub hinge_loss: f64,
    pub gradient_is_zero: bool,
    pub safe_eps: f64,
    pub dead_examples: usize,
    pub perturbations: usize,
    /// Perturbations that changed the loss at all.
    pub loss_changes: usize,
}

impl LocalMinInstance {
    pub fn is_bad_local_min(&self) -> bool {
        self.hinge_loss > 0.5 && self.gradient_is_zero && self.loss_changes == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalMinSummary {
    pub task: &'static str,
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub all_bad_local_minima: bool,
    pub instances: Vec<LocalMinInstance>,
}

/// Builds the ReLU bad local minimum for one seeded dataset and probes it
/// with random perturbations of norm below `safe_eps`.
pub fn probe_local_min(d: usize, n: usize, k: usize, norm_wstar: f64, perturbations: usize, seed: u64) -> Result<LocalMinInstance> {
    let data = generate_separable(&SeparableSpec { d, n, norm_wstar, seed })?;
    let mut rng = seeded_rng(seed);
    let b = relu_bad_local_min(&data, k, &mut rng)?;
    let base = hinge_loss(&b.params, &data)?;
    let gradient_is_zero = full_batch_subgradient(&b.params, &data)?.is_zero();
    let mut loss_changes = 0;
    let (rows, cols) = (b.params.weights().rows(), b.params.weights().cols());
    for _ in 0..perturbations {
        let mut dir = Matrix::zeros(rows, cols);
        for x in dir.as_mut_slice() {
            *x = rng.standard_normal();
        }
        let len = dir.frobenius_norm();
        let scale = rng.uniform(0.0, 1.0) * b.safe_eps / len;
        let mut w = b.params.weights().clone();
        w.add_scaled(scale, &dir);
        if hinge_loss(&b.params.with_weights(w)?, &data)? != base {
            loss_changes += 1;
        }
    }
    Ok(LocalMinInstance {
        seed,
        hinge_loss: base,
        gradient_is_zero,
        safe_eps: b.safe_eps,
        dead_examples: b.dead_examples,
        perturbations,
        loss_changes,
    })
}

fn run_localmin_task(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let r = &config.relu;
    let instances: Vec<LocalMinInstance> = (0..config.runs as u64)
        .into_par_iter()
        .map(|i| {
            probe_local_min(
                r.localmin_d,
                r.localmin_n,
                r.localmin_k,
                r.localmin_norm_wstar,
                r.perturbations,
                config.base_seed.wrapping_add(i),
            )
        })
        .collect::<Result<_>>()?;
    let summary = LocalMinSummary {
        task: config.task.as_str(),
        d: r.localmin_d,
        n: r.localmin_n,
        k: r.localmin_k,
        all_bad_local_minima: instances.iter().all(LocalMinInstance::is_bad_local_min),
        instances,
    };
    let p = dir.join("summary.json");
    write_json(&p, &summary)?;
    Ok(vec![p])
}

/// `(1 - 2^{-k})^d`: probability that no coordinate is dead at width `k`.
pub fn closed_form_global(d: usize, k: usize) -> f64 {
    (1.0 - 0.5f64.powi(k as i32)).powi(d as i32)
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloRow {
    pub k: usize,
    #[serde(flatten)]
    pub result: MonteCarloSummary,
    pub closed_form_global: f64,
    pub within_iteration_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub task: &'static str,
    pub d: usize,
    pub c: f64,
    pub eta: f64,
    pub bounds: Vec<BoundReport>,
    pub per_k: Vec<MonteCarloRow>,
}

fn run_montecarlo_task(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let r = &config.relu;
    let iter_bound = BoundReport::relu_iterations(r.d, r.c, r.eta)?;
    let mut bounds = BoundReport::relu_thresholds(r.d, r.delta)?.to_vec();
    bounds.push(iter_bound.clone());
    let mut per_k = Vec::new();
    for &k in &r.k {
        let result = monte_carlo_relu_with_order(r.d, k, r.c, r.eta, r.trials, config.base_seed, config.trainer.order)?;
        per_k.push(MonteCarloRow {
            k,
            within_iteration_bound: result.max_iters_when_global as f64 <= iter_bound.value,
            closed_form_global: closed_form_global(r.d, k),
            result,
        });
    }
    let empirical: Vec<(f64, f64)> = per_k.iter().map(|row| (row.k as f64, row.result.frac_global)).collect();
    let predicted: Vec<(f64, f64)> = per_k.iter().map(|row| (row.k as f64, row.closed_form_global)).collect();
    let p_svg = dir.join("relu_montecarlo.svg");
    emit_svg_plot(
        &p_svg,
        &[Series::new("empirical", empirical), Series::new("(1 - 2^-k)^d", predicted)],
        &format!("ReLU success on orthogonal data, d = {}", r.d),
        "k",
        "fraction reaching a global minimum",
    )?;
    let summary = MonteCarloReport { task: config.task.as_str(), d: r.d, c: r.c, eta: r.eta, bounds, per_k };
    let p = dir.join("summary.json");
    write_json(&p, &summary)?;
    Ok(vec![p_svg, p])
}

/// Reads `summary.json` back, for tests and tooling.
pub fn read_summary(dir: &Path) -> Result<serde_json::Value> {
    let p = dir.join("summary.json");
    let text = std::fs::read_to_string(&p).map_err(io_err(&p))?;
    Ok(serde_json::from_str(&text)?)
}
