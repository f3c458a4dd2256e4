use crate::error::{invalid, Error, Result};
use crate::rng::seeded_rng;
use crate::types::{dot, Example, LabeledDataset};

/// Sampling contract for a synthetic separable dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableSpec {
    pub d: usize,
    pub n: usize,
    /// Norm of the generated unit-margin separator; at least 1.
    pub norm_wstar: f64,
    pub seed: u64,
}

const MIN_ACCEPTANCE: f64 = 1e-4;
const ACCEPTANCE_PROBE: u64 = 100_000;

/// Points uniform in the unit ball, kept when `y⟨w*, x⟩ ≥ 1` for
/// `w* = norm_wstar·ŵ` with a random unit direction `ŵ`; labels are the sign
/// of `⟨ŵ, x⟩`.
pub fn generate_separable(spec: &SeparableSpec) -> Result<LabeledDataset> {
    if spec.d == 0 || spec.n == 0 {
        return Err(invalid(format!("need d ≥ 1 and n ≥ 1, got d = {}, n = {}", spec.d, spec.n)));
    }
    if !(spec.norm_wstar >= 1.0 && spec.norm_wstar.is_finite()) {
        return Err(invalid(format!("separator norm must be at least 1, got {}", spec.norm_wstar)));
    }
    let mut rng = seeded_rng(spec.seed);
    let dir = rng.unit_vector(spec.d);
    let wstar: Vec<f64> = dir.iter().map(|v| v * spec.norm_wstar).collect();

    let mut examples = Vec::with_capacity(spec.n);
    let mut attempts = 0u64;
    while examples.len() < spec.n {
        attempts += 1;
        let x = rng.in_ball(spec.d, 1.0);
        let p = dot(&wstar, &x);
        if p.abs() >= 1.0 {
            let y = if p > 0.0 { 1.0 } else { -1.0 };
            examples.push(Example::new(x, y)?);
        }
        if attempts >= ACCEPTANCE_PROBE {
            let rate = examples.len() as f64 / attempts as f64;
            if rate < MIN_ACCEPTANCE {
                return Err(Error::InfeasibleMargin { rate });
            }
        }
    }
    LabeledDataset::new(examples, Some(wstar))
}

/// Mistake-driven linear updates `w ← w + y·x` until a pass without
/// mistakes, then rescaled so the smallest margin is one.
///
/// The result's norm upper-bounds the minimal separator norm and stands in
/// for `‖w*‖` on real data.
pub fn estimate_separator(dataset: &LabeledDataset, max_passes: usize) -> Result<Vec<f64>> {
    let mut w = vec![0.0; dataset.dim()];
    for _ in 0..max_passes {
        let mut mistakes = 0usize;
        for ex in dataset.examples() {
            if ex.y() * dot(&w, ex.x()) <= 0.0 {
                for (wj, xj) in w.iter_mut().zip(ex.x()) {
                    *wj += ex.y() * xj;
                }
                mistakes += 1;
            }
        }
        if mistakes == 0 {
            let min_margin = dataset
                .examples()
                .iter()
                .map(|ex| ex.y() * dot(&w, ex.x()))
                .fold(f64::INFINITY, f64::min);
            return Ok(w.into_iter().map(|v| v / min_margin).collect());
        }
    }
    Err(Error::NotSeparable { passes: max_passes })
}
