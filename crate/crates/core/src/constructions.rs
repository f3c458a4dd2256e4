//! Explicit instances: the adversarial basis sequence used for the lower
//! bound, the ReLU bad local minimum, and the orthogonal-basis task whose
//! outcome is fixed by the initial dead set.

use std::collections::BTreeSet;

use crate::error::{invalid, Error, Result};
use crate::rng::SeededRng;
use crate::types::{dot, norm, Activation, Example, LabeledDataset, Matrix, NetworkParams};

/// Standard basis vectors `(e_j, +1)`, `j = 1..d`, with separator `(1,…,1)`.
pub fn adversarial_sequence(d: usize) -> Result<LabeledDataset> {
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    let examples = (0..d)
        .map(|j| {
            let mut x = vec![0.0; d];
            x[j] = 1.0;
            Example::new(x, 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledDataset::new(examples, Some(vec![1.0; d]))
}

/// The orthogonal-basis task; the same dataset as [`adversarial_sequence`].
pub fn orthogonal_dataset(d: usize) -> Result<LabeledDataset> {
    adversarial_sequence(d)
}

/// Every positive-side row `−(R/√d)·1`, every negative-side row `+(R/√d)·1`.
pub fn adversarial_init(k: usize, d: usize, r: f64, v: f64, activation: Activation) -> Result<NetworkParams> {
    if k == 0 || d == 0 {
        return Err(invalid("k and d must be at least 1"));
    }
    if !(r > 0.0) {
        return Err(invalid(format!("R must be positive, got {r}")));
    }
    let entry = r / (d as f64).sqrt();
    let mut w = Matrix::zeros(2 * k, d);
    for i in 0..2 * k {
        let value = if i < k { -entry } else { entry };
        w.row_mut(i).iter_mut().for_each(|x| *x = value);
    }
    NetworkParams::new(w, v, activation)
}

/// Coordinates `j` (zero-based) with `⟨w⁽ⁱ⁾, e_j⟩ ≤ 0` for every positive-side row.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeadSet {
    pub indices: BTreeSet<usize>,
}

impl DeadSet {
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }
}

pub fn dead_set(params: &NetworkParams) -> DeadSet {
    let indices = (0..params.dim())
        .filter(|&j| (0..params.k()).all(|i| params.w_row(i)[j] <= 0.0))
        .collect();
    DeadSet { indices }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReluOutcome {
    Global,
    NonGlobal,
}

/// Outcome of ReLU SGD on the orthogonal-basis task, read off the initial
/// weights: a dead coordinate never revives, so any dead coordinate means a
/// non-global stationary point.
pub fn predict_relu_outcome(params: &NetworkParams) -> ReluOutcome {
    if dead_set(params).is_empty() {
        ReluOutcome::Global
    } else {
        ReluOutcome::NonGlobal
    }
}

#[derive(Debug, Clone)]
pub struct BadLocalMin {
    pub params: NetworkParams,
    /// Perturbations of Frobenius norm below this leave every activation sign
    /// and every margin-vs-1 status unchanged.
    pub safe_eps: f64,
    /// Examples on which every neuron is inactive.
    pub dead_examples: usize,
}

const MAX_DIRECTION_DRAWS: usize = 100;

/// ReLU weights with `v = 1` at which a strict majority of examples have all
/// neurons off: loss above 1/2, zero gradient, locally constant loss.
///
/// A random direction `ŵ` avoiding every example's orthogonal hyperplane is
/// oriented so that most examples lie on its negative side. With
/// `a = min|⟨ŵ,x⟩|/2` and `c = 2‖w*‖/a`, positive-side rows are `cŵ + w*` and
/// negative-side rows `cŵ − w*`.
pub fn relu_bad_local_min(dataset: &LabeledDataset, k: usize, rng: &mut SeededRng) -> Result<BadLocalMin> {
    let wstar = dataset
        .separator()
        .ok_or_else(|| invalid("bad local minimum construction needs a separator"))?;
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let d = dataset.dim();
    let n = dataset.len();
    let examples = dataset.examples();

    let mut chosen = None;
    for _ in 0..MAX_DIRECTION_DRAWS {
        let mut dir = rng.unit_vector(d);
        let proj: Vec<f64> = examples.iter().map(|e| dot(&dir, e.x())).collect();
        if proj.contains(&0.0) {
            continue;
        }
        let negatives = proj.iter().filter(|&&p| p < 0.0).count();
        if 2 * negatives <= n {
            if 2 * (n - negatives) > n {
                dir.iter_mut().for_each(|v| *v = -*v);
            } else {
                continue;
            }
        }
        chosen = Some(dir);
        break;
    }
    let dir = chosen.ok_or_else(|| Error::ConstructionFailed {
        attempts: MAX_DIRECTION_DRAWS,
        reason: "no direction puts a strict majority of examples on one side".into(),
    })?;

    let min_abs = examples.iter().map(|e| dot(&dir, e.x()).abs()).fold(f64::INFINITY, f64::min);
    let a = min_abs / 2.0;
    let c = 2.0 * norm(wstar) / a;
    let w_row: Vec<f64> = dir.iter().zip(wstar).map(|(h, s)| c * h + s).collect();
    let u_row: Vec<f64> = dir.iter().zip(wstar).map(|(h, s)| c * h - s).collect();
    let rows: Vec<Vec<f64>> = (0..2 * k).map(|i| if i < k { w_row.clone() } else { u_row.clone() }).collect();
    let params = NetworkParams::new(Matrix::from_rows(&rows)?, 1.0, Activation::Relu)?;

    let mut dead = 0;
    let mut min_pre = f64::INFINITY;
    let mut min_slack = f64::INFINITY;
    for e in examples {
        let zw = dot(&w_row, e.x());
        let zu = dot(&u_row, e.x());
        min_pre = min_pre.min(zw.abs()).min(zu.abs());
        if zw < 0.0 && zu < 0.0 {
            dead += 1;
        } else if zw > 0.0 && zu > 0.0 {
            let out = crate::network::forward_unchecked(&params, e.x());
            min_slack = min_slack.min(e.y() * out - 1.0);
        } else {
            return Err(Error::ConstructionFailed {
                attempts: 1,
                reason: "mixed activation pattern on an example".into(),
            });
        }
    }
    if 2 * dead <= n || !(min_slack > 0.0) || !(min_pre > 0.0) {
        return Err(Error::ConstructionFailed {
            attempts: 1,
            reason: "constructed weights do not separate dead and satisfied examples".into(),
        });
    }

    // A row perturbation of norm < ε moves each pre-activation by < ε‖x‖ and
    // each output by < 2k·v·ε‖x‖.
    let x_max = examples.iter().map(|e| norm(e.x())).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let by_sign = min_pre / x_max;
    let by_margin = min_slack / (2.0 * k as f64 * params.v() * x_max);
    let safe_eps = by_sign.min(by_margin) / 2.0;

    Ok(BadLocalMin { params, safe_eps, dead_examples: dead })
}
