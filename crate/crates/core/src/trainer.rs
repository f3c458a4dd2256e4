//! Batch-size-1 SGD with exact non-zero update accounting.
//!
//! A run alternates epochs of `n` SGD steps with a deterministic sweep over the
//! whole training set. The sweep decides termination: every margin at least
//! `1 - margin_tol` ends the run at a global minimum, and a sweep in which no
//! example has a nonzero subgradient (possible only for ReLU) ends it at a
//! non-global stationary point.

use crate::error::{invalid, Error, Result};
use crate::network::{forward_unchecked, gradient_coefficients, predict};
use crate::rng::{seeded_rng, SeededRng};
use crate::types::{
    dot, norm, Activation, EpochStats, Example, LabeledDataset, Matrix, NetworkParams, RunRecord,
    RunStatus, SamplingOrder, TrainConfig, TrajectoryPoint,
};

/// How the first-layer weights are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum InitScheme {
    /// `R = v = 1/√(2k)`; every row uniform in the radius-`R` ball.
    Default,
    /// Rows uniform in the radius-`r` ball, second layer scale `v`.
    BoundedRows { r: f64, v: f64 },
    /// Entries i.i.d. uniform on `[-c, c]`, `v = 1`.
    SymmetricBox { c: f64 },
    /// Fixed weights.
    Explicit { weights: Matrix, v: f64 },
}

impl InitScheme {
    /// Row-norm radius the scheme guarantees, when it guarantees one.
    pub fn row_radius(&self, k: usize) -> Option<f64> {
        match *self {
            InitScheme::Default => Some(default_scale(k)),
            InitScheme::BoundedRows { r, .. } => Some(r),
            _ => None,
        }
    }

    /// Second-layer scale `v` the scheme produces.
    pub fn second_layer(&self, k: usize) -> f64 {
        match *self {
            InitScheme::Default => default_scale(k),
            InitScheme::BoundedRows { v, .. } => v,
            InitScheme::SymmetricBox { .. } => 1.0,
            InitScheme::Explicit { v, .. } => v,
        }
    }
}

/// `1/√(2k)`.
pub fn default_scale(k: usize) -> f64 {
    1.0 / ((2 * k) as f64).sqrt()
}

fn sample_row_in_ball(rng: &mut SeededRng, d: usize, radius: f64) -> Vec<f64> {
    let mut row = rng.in_ball(d, radius);
    let n = norm(&row);
    if n > radius {
        let s = radius / n;
        row.iter_mut().for_each(|v| *v *= s);
    }
    while norm(&row) > radius {
        row.iter_mut().for_each(|v| *v *= 1.0 - f64::EPSILON);
    }
    row
}

pub fn initialize(
    scheme: &InitScheme,
    k: usize,
    d: usize,
    activation: Activation,
    rng: &mut SeededRng,
) -> Result<NetworkParams> {
    if k == 0 || d == 0 {
        return Err(invalid(format!("need k ≥ 1 and d ≥ 1, got k = {k}, d = {d}")));
    }
    match scheme {
        InitScheme::Default | InitScheme::BoundedRows { .. } => {
            let r = scheme.row_radius(k).expect("ball schemes carry a radius");
            if !(r > 0.0 && r.is_finite()) {
                return Err(invalid(format!("row radius must be positive, got {r}")));
            }
            let rows: Vec<Vec<f64>> = (0..2 * k).map(|_| sample_row_in_ball(rng, d, r)).collect();
            NetworkParams::new(Matrix::from_rows(&rows)?, scheme.second_layer(k), activation)
        }
        InitScheme::SymmetricBox { c } => {
            let c = *c;
            if !(c >= 0.0 && c.is_finite()) {
                return Err(invalid(format!("box half-width must be non-negative, got {c}")));
            }
            let mut w = Matrix::zeros(2 * k, d);
            if c > 0.0 {
                for v in w.as_mut_slice() {
                    *v = rng.uniform(-c, c);
                }
            }
            NetworkParams::new(w, 1.0, activation)
        }
        InitScheme::Explicit { weights, v } => {
            if (weights.rows(), weights.cols()) != (2 * k, d) {
                return Err(Error::DimensionMismatch {
                    expected: 2 * k * d,
                    found: weights.rows() * weights.cols(),
                });
            }
            NetworkParams::new(weights.clone(), *v, activation)
        }
    }
}

/// Per-run buffers reused across steps.
struct Scratch {
    slopes: Vec<f64>,
    coeffs: Vec<f64>,
}

impl Scratch {
    fn new(k: usize) -> Self {
        Self { slopes: vec![0.0; 2 * k], coeffs: vec![0.0; 2 * k] }
    }
}

/// `W ← W − η·∂L/∂W` on one example. Returns whether the subgradient was nonzero.
fn step_in_place(params: &mut NetworkParams, x: &[f64], y: f64, eta: f64, s: &mut Scratch) -> bool {
    if !gradient_coefficients(params, x, y, &mut s.slopes, &mut s.coeffs) {
        return false;
    }
    let mut nonzero = false;
    let w = params.weights_mut();
    for (r, &c) in s.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (wj, &xj) in w.row_mut(r).iter_mut().zip(x) {
            let g = c * xj;
            if g != 0.0 {
                nonzero = true;
            }
            *wj -= eta * g;
        }
    }
    nonzero
}

/// One SGD step on `example`. Returns `true` iff the subgradient was nonzero;
/// otherwise `params` is left untouched.
pub fn sgd_step(params: &mut NetworkParams, example: &Example, eta: f64) -> Result<bool> {
    if example.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: example.dim() });
    }
    let mut s = Scratch::new(params.k());
    Ok(step_in_place(params, example.x(), example.y(), eta, &mut s))
}

/// State visible to an observer after every SGD step.
#[derive(Debug)]
pub struct StepEvent<'a> {
    /// Zero-based step index over the whole run.
    pub step: u64,
    pub epoch: usize,
    pub example_index: usize,
    pub nonzero: bool,
    /// Non-zero updates so far, this step included.
    pub nonzero_updates: u64,
    pub params: &'a NetworkParams,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub record: RunRecord,
    pub params: NetworkParams,
}

struct Sweep {
    hinge_loss: f64,
    train_error: f64,
    min_margin: f64,
    any_nonzero_gradient: bool,
}

fn sweep(params: &NetworkParams, data: &LabeledDataset, s: &mut Scratch) -> Sweep {
    let mut loss = 0.0;
    let mut wrong = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut any_nonzero_gradient = false;
    for ex in data.examples() {
        let out = forward_unchecked(params, ex.x());
        let m = ex.y() * out;
        loss += (1.0 - m).max(0.0);
        if predict(out) != ex.y() {
            wrong += 1;
        }
        min_margin = min_margin.min(m);
        if m < 1.0 && !any_nonzero_gradient {
            gradient_coefficients(params, ex.x(), ex.y(), &mut s.slopes, &mut s.coeffs);
            any_nonzero_gradient = s
                .coeffs
                .iter()
                .any(|&c| ex.x().iter().any(|&xj| c * xj != 0.0));
        }
    }
    let n = data.len() as f64;
    Sweep { hinge_loss: loss / n, train_error: wrong as f64 / n, min_margin, any_nonzero_gradient }
}

fn test_error(params: &NetworkParams, test: Option<&LabeledDataset>) -> Option<f64> {
    test.map(|t| {
        let wrong = t
            .examples()
            .iter()
            .filter(|ex| predict(forward_unchecked(params, ex.x())) != ex.y())
            .count();
        wrong as f64 / t.len() as f64
    })
}

/// Runs SGD from `params` and returns the run record.
pub fn train(
    params: NetworkParams,
    dataset: &LabeledDataset,
    config: &TrainConfig,
    test: Option<&LabeledDataset>,
) -> Result<RunRecord> {
    train_observed(params, dataset, config, test, |_| {}).map(|o| o.record)
}

/// [`train`] with a callback after every SGD step; also returns the final weights.
pub fn train_observed<F>(
    mut params: NetworkParams,
    dataset: &LabeledDataset,
    config: &TrainConfig,
    test: Option<&LabeledDataset>,
    mut observer: F,
) -> Result<TrainOutcome>
where
    F: FnMut(&StepEvent<'_>),
{
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if dataset.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: dataset.dim() });
    }
    if let Some(t) = test {
        if t.dim() != params.dim() {
            return Err(Error::DimensionMismatch { expected: params.dim(), found: t.dim() });
        }
    }
    let wstar = if config.record_trajectory {
        Some(dataset.separator().ok_or_else(|| invalid("trajectory recording needs a separator"))?)
    } else {
        None
    };

    let n = dataset.len();
    let examples = dataset.examples();
    let mut rng = seeded_rng(config.seed);
    let mut scratch = Scratch::new(params.k());
    let mut nonzero_updates = 0u64;
    let mut step = 0u64;
    let mut trajectory = wstar.map(|w| vec![trajectory_point(&params, w, 0)]);
    let mut epoch_stats = Vec::new();

    let mut status = RunStatus::EpochLimit;
    for epoch in 0..=config.max_epochs {
        if epoch > 0 {
            for i in 0..n {
                let idx = match config.order {
                    SamplingOrder::Cyclic => i,
                    SamplingOrder::UniformWithReplacement => rng.index(n),
                };
                let ex = &examples[idx];
                let nonzero = step_in_place(&mut params, ex.x(), ex.y(), config.eta, &mut scratch);
                if nonzero {
                    nonzero_updates += 1;
                    if let (Some(traj), Some(w)) = (trajectory.as_mut(), wstar) {
                        traj.push(trajectory_point(&params, w, nonzero_updates));
                    }
                }
                observer(&StepEvent {
                    step,
                    epoch,
                    example_index: idx,
                    nonzero,
                    nonzero_updates,
                    params: &params,
                });
                step += 1;
            }
        }

        let s = sweep(&params, dataset, &mut scratch);
        epoch_stats.push(EpochStats {
            epoch,
            hinge_loss: s.hinge_loss,
            train_error: s.train_error,
            test_error: test_error(&params, test),
            nonzero_updates,
        });
        if s.min_margin >= 1.0 - config.margin_tol {
            status = RunStatus::GlobalMin;
            break;
        }
        if !s.any_nonzero_gradient {
            status = RunStatus::NonglobalStall;
            break;
        }
    }

    Ok(TrainOutcome {
        record: RunRecord { nonzero_updates, total_steps: step, status, epoch_stats, trajectory },
        params,
    })
}

/// `(F, G, cosine)` for the current weights against separator `wstar`.
pub fn trajectory_point(params: &NetworkParams, wstar: &[f64], t: u64) -> TrajectoryPoint {
    let k = params.k();
    let pos: f64 = (0..k).map(|i| dot(params.w_row(i), wstar)).sum();
    let neg: f64 = (0..k).map(|i| dot(params.u_row(i), wstar)).sum();
    let f = pos - neg;
    let g = params.weights().frobenius_norm();
    let denom = g * ((2 * k) as f64).sqrt() * norm(wstar);
    let cosine = if denom > 0.0 { f / denom } else { 0.0 };
    TrajectoryPoint { t, f, g, cosine }
}

/// Trajectory over a stored history of weights, indexed by position.
pub fn trajectory_diagnostics(history: &[NetworkParams], wstar: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    history
        .iter()
        .enumerate()
        .map(|(t, p)| {
            if p.dim() != wstar.len() {
                return Err(Error::DimensionMismatch { expected: p.dim(), found: wstar.len() });
            }
            Ok(trajectory_point(p, wstar, t as u64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{hinge_loss, subgradient};

    fn leaky(alpha: f64) -> Activation {
        Activation::leaky_relu(alpha).unwrap()
    }

    #[test]
    fn default_init_for_k2() {
        let mut rng = seeded_rng(5);
        let p = initialize(&InitScheme::Default, 2, 7, leaky(0.3), &mut rng).unwrap();
        assert_eq!(p.v(), 0.5);
        for r in 0..4 {
            assert!(norm(p.weights().row(r)) <= 0.5);
        }
    }

    #[test]
    fn box_of_zero_width_is_zero() {
        let mut rng = seeded_rng(5);
        let p = initialize(&InitScheme::SymmetricBox { c: 0.0 }, 3, 4, Activation::Relu, &mut rng).unwrap();
        assert!(p.weights().is_zero());
        assert_eq!(p.v(), 1.0);
    }

    #[test]
    fn box_entries_bounded() {
        let mut rng = seeded_rng(11);
        let p = initialize(&InitScheme::SymmetricBox { c: 1.5 }, 4, 9, Activation::Relu, &mut rng).unwrap();
        assert!(p.weights().as_slice().iter().all(|v| v.abs() <= 1.5));
    }

    #[test]
    fn bounded_rows_never_exceed_radius() {
        let mut rng = seeded_rng(2);
        let scheme = InitScheme::BoundedRows { r: 1.0, v: 1.0 };
        let p = initialize(&scheme, 5_000, 3, leaky(0.1), &mut rng).unwrap();
        let max = (0..10_000).map(|r| norm(p.weights().row(r))).fold(0.0, f64::max);
        assert!(max <= 1.0);
        assert!(max > 0.95, "ball sampling should reach near the boundary, max = {max}");
    }

    #[test]
    fn invalid_schemes_are_rejected() {
        let mut rng = seeded_rng(0);
        let a = leaky(0.2);
        assert!(initialize(&InitScheme::BoundedRows { r: 0.0, v: 1.0 }, 1, 1, a, &mut rng).is_err());
        assert!(initialize(&InitScheme::BoundedRows { r: 1.0, v: -1.0 }, 1, 1, a, &mut rng).is_err());
        assert!(initialize(&InitScheme::SymmetricBox { c: -1.0 }, 1, 1, a, &mut rng).is_err());
        assert!(initialize(&InitScheme::Default, 0, 1, a, &mut rng).is_err());
        let explicit = InitScheme::Explicit { weights: Matrix::zeros(2, 3), v: 1.0 };
        assert!(initialize(&explicit, 2, 3, a, &mut rng).is_err());
    }

    #[test]
    fn inactive_step_leaves_params() {
        let w = Matrix::from_rows(&[vec![2.0], vec![0.0]]).unwrap();
        let mut p = NetworkParams::new(w, 1.0, leaky(0.5)).unwrap();
        let before = p.clone();
        let nonzero = sgd_step(&mut p, &Example::new(vec![1.0], 1.0).unwrap(), 1.0).unwrap();
        assert!(!nonzero);
        assert_eq!(p, before);
    }

    #[test]
    fn step_hand_example() {
        let w = Matrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let mut p = NetworkParams::new(w, 1.0, leaky(0.5)).unwrap();
        let nonzero = sgd_step(&mut p, &Example::new(vec![1.0, 0.0], 1.0).unwrap(), 1.0).unwrap();
        assert!(nonzero);
        assert_eq!(p.w_row(0), &[-0.5, 0.0]);
        assert_eq!(p.u_row(0), &[-1.0, 0.0]);
    }

    #[test]
    fn step_matches_subgradient_bitwise() {
        let mut rng = seeded_rng(8);
        let mut p = initialize(&InitScheme::BoundedRows { r: 1.0, v: 0.3 }, 3, 4, leaky(0.2), &mut rng).unwrap();
        let ex = Example::new(rng.in_ball(4, 1.0), 1.0).unwrap();
        let g = subgradient(&p, &ex).unwrap().grad;
        let mut expected = p.weights().clone();
        expected.add_scaled(-0.7, &g);
        sgd_step(&mut p, &ex, 0.7).unwrap();
        assert_eq!(p.weights(), &expected);
    }

    #[test]
    fn relu_dead_step_changes_nothing() {
        let w = Matrix::from_rows(&[vec![-1.0, -1.0], vec![-0.5, 0.0]]).unwrap();
        let mut p = NetworkParams::new(w, 1.0, Activation::Relu).unwrap();
        let ex = Example::new(vec![0.6, 0.6], 1.0).unwrap();
        let before = p.clone();
        assert!(!sgd_step(&mut p, &ex, 0.5).unwrap());
        assert_eq!(p, before);
        let single = LabeledDataset::new(vec![ex], None).unwrap();
        assert_eq!(hinge_loss(&p, &single).unwrap(), 1.0);
    }

    #[test]
    fn already_satisfied_dataset_stops_immediately() {
        let data = LabeledDataset::new(
            vec![Example::new(vec![1.0], 1.0).unwrap(), Example::new(vec![-1.0], -1.0).unwrap()],
            Some(vec![1.0]),
        )
        .unwrap();
        let w = Matrix::from_rows(&[vec![2.0], vec![-2.0]]).unwrap();
        let p = NetworkParams::new(w, 1.0, leaky(0.5)).unwrap();
        let rec = train(p, &data, &TrainConfig::new(0.1), None).unwrap();
        assert_eq!(rec.status, RunStatus::GlobalMin);
        assert_eq!(rec.nonzero_updates, 0);
        assert_eq!(rec.total_steps, 0);
        assert_eq!(rec.epochs(), 0);
    }

    #[test]
    fn epoch_limit_is_reported() {
        let data = LabeledDataset::new(vec![Example::new(vec![0.01], 1.0).unwrap()], Some(vec![100.0])).unwrap();
        let p = NetworkParams::zeros(1, 1, 0.01, leaky(0.5)).unwrap();
        let cfg = TrainConfig::new(1e-3).with_max_epochs(3);
        let rec = train(p, &data, &cfg, None).unwrap();
        assert_eq!(rec.status, RunStatus::EpochLimit);
        assert_eq!(rec.epochs(), 3);
        assert_eq!(rec.nonzero_updates, 3);
    }

    #[test]
    fn trajectory_requires_separator() {
        let data = LabeledDataset::new(vec![Example::new(vec![0.5], 1.0).unwrap()], None).unwrap();
        let p = NetworkParams::zeros(1, 1, 1.0, leaky(0.5)).unwrap();
        let cfg = TrainConfig::new(0.1).with_trajectory(true);
        assert!(train(p, &data, &cfg, None).is_err());
    }

    #[test]
    fn trajectory_of_zero_weights() {
        let p = NetworkParams::zeros(2, 3, 1.0, leaky(0.5)).unwrap();
        let pt = trajectory_point(&p, &[1.0, 2.0, 0.0], 0);
        assert_eq!((pt.f, pt.g, pt.cosine), (0.0, 0.0, 0.0));
    }

    #[test]
    fn first_update_from_zero_raises_f() {
        let data = LabeledDataset::new(vec![Example::new(vec![0.5, 0.0], 1.0).unwrap()], Some(vec![2.0, 0.0])).unwrap();
        let (k, eta, v, alpha) = (3, 0.4, 0.2, 0.25);
        let mut p = NetworkParams::zeros(k, 2, v, leaky(alpha)).unwrap();
        let before = trajectory_point(&p, data.separator().unwrap(), 0);
        assert!(sgd_step(&mut p, &data.examples()[0], eta).unwrap());
        let history = vec![NetworkParams::zeros(k, 2, v, leaky(alpha)).unwrap(), p];
        let traj = trajectory_diagnostics(&history, data.separator().unwrap()).unwrap();
        assert_eq!(traj[0], before);
        assert!(traj[1].f - traj[0].f >= 2.0 * k as f64 * eta * v * alpha - 1e-12);
        assert!(traj[1].cosine <= 1.0 + 1e-12);
    }
}
