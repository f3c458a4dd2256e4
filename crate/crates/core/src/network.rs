//! Forward pass, hinge loss and subgradients of the two-layer network
//! `N(x) = v·(Σᵢ σ(⟨w⁽ⁱ⁾, x⟩) − Σᵢ σ(⟨u⁽ⁱ⁾, x⟩))`.
//!
//! Subgradient conventions at a zero pre-activation: Leaky ReLU takes slope 1,
//! ReLU takes slope 0. An example is active (contributes a gradient) iff its
//! margin `y·N(x)` is strictly below 1.

use crate::error::{invalid, Error, Result};
use crate::types::{dot, norm, Activation, Example, LabeledDataset, Matrix, NetworkParams};

pub fn activation(z: f64, kind: Activation) -> f64 {
    match kind {
        Activation::LeakyRelu { alpha } => z.max(alpha * z),
        Activation::Relu => z.max(0.0),
    }
}

/// Slope used in the subgradient at pre-activation `z`.
pub fn slope(z: f64, kind: Activation) -> f64 {
    match kind {
        Activation::LeakyRelu { alpha } => {
            if z >= 0.0 {
                1.0
            } else {
                alpha
            }
        }
        Activation::Relu => {
            if z > 0.0 {
                1.0
            } else {
                0.0
            }
        }
    }
}

fn check_dim(params: &NetworkParams, x: &[f64]) -> Result<()> {
    if x.len() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: x.len() });
    }
    Ok(())
}

/// Network output; the caller guarantees matching dimensions.
pub(crate) fn forward_unchecked(params: &NetworkParams, x: &[f64]) -> f64 {
    let kind = params.activation();
    let k = params.k();
    let w = params.weights();
    let pos: f64 = (0..k).map(|i| activation(dot(w.row(i), x), kind)).sum();
    let neg: f64 = (k..2 * k).map(|i| activation(dot(w.row(i), x), kind)).sum();
    params.v() * (pos - neg)
}

pub fn forward(params: &NetworkParams, x: &[f64]) -> Result<f64> {
    check_dim(params, x)?;
    Ok(forward_unchecked(params, x))
}

/// `y·N(x)`.
pub fn margin(params: &NetworkParams, example: &Example) -> Result<f64> {
    Ok(example.y() * forward(params, example.x())?)
}

fn check_dataset(params: &NetworkParams, dataset: &LabeledDataset) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if dataset.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: dataset.dim() });
    }
    Ok(())
}

/// Mean hinge loss `(1/n) Σ max(1 − yᵢN(xᵢ), 0)`.
pub fn hinge_loss(params: &NetworkParams, dataset: &LabeledDataset) -> Result<f64> {
    check_dataset(params, dataset)?;
    let total: f64 = dataset
        .examples()
        .iter()
        .map(|ex| (1.0 - ex.y() * forward_unchecked(params, ex.x())).max(0.0))
        .sum();
    Ok(total / dataset.len() as f64)
}

/// Sign prediction; a zero output predicts `+1`.
pub fn predict(output: f64) -> f64 {
    if output >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub fn zero_one_error(params: &NetworkParams, dataset: &LabeledDataset) -> Result<f64> {
    check_dataset(params, dataset)?;
    let wrong = dataset
        .examples()
        .iter()
        .filter(|ex| predict(forward_unchecked(params, ex.x())) != ex.y())
        .count();
    Ok(wrong as f64 / dataset.len() as f64)
}

/// Subgradient of the single-example hinge loss with respect to `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientReport {
    pub grad: Matrix,
    /// `y·N(x) < 1`.
    pub active: bool,
    /// Slopes of the positive-side neurons.
    pub slopes_p: Vec<f64>,
    /// Slopes of the negative-side neurons.
    pub slopes_q: Vec<f64>,
}

/// Fills `coeffs` (length 2k) so that gradient row `r` equals `coeffs[r]·x`,
/// and returns whether the example is active. Inactive examples leave
/// `coeffs` zeroed. `slopes` receives the per-row subgradient slope.
pub(crate) fn gradient_coefficients(
    params: &NetworkParams,
    x: &[f64],
    y: f64,
    slopes: &mut [f64],
    coeffs: &mut [f64],
) -> bool {
    let kind = params.activation();
    let k = params.k();
    let w = params.weights();
    let mut pos = 0.0;
    let mut neg = 0.0;
    for r in 0..2 * k {
        let z = dot(w.row(r), x);
        slopes[r] = slope(z, kind);
        if r < k {
            pos += activation(z, kind);
        } else {
            neg += activation(z, kind);
        }
    }
    let out = params.v() * (pos - neg);
    let active = y * out < 1.0;
    for r in 0..2 * k {
        coeffs[r] = if !active {
            0.0
        } else if r < k {
            -params.v() * slopes[r] * y
        } else {
            params.v() * slopes[r] * y
        };
    }
    active
}

pub fn subgradient(params: &NetworkParams, example: &Example) -> Result<SubgradientReport> {
    check_dim(params, example.x())?;
    let k = params.k();
    let mut slopes = vec![0.0; 2 * k];
    let mut coeffs = vec![0.0; 2 * k];
    let active = gradient_coefficients(params, example.x(), example.y(), &mut slopes, &mut coeffs);
    let mut grad = Matrix::zeros(2 * k, params.dim());
    if active {
        for (r, &c) in coeffs.iter().enumerate() {
            for (g, &xj) in grad.row_mut(r).iter_mut().zip(example.x()) {
                *g = c * xj;
            }
        }
    }
    let slopes_q = slopes.split_off(k);
    Ok(SubgradientReport { grad, active, slopes_p: slopes, slopes_q })
}

/// Mean subgradient of the hinge loss over the whole dataset.
pub fn full_batch_subgradient(params: &NetworkParams, dataset: &LabeledDataset) -> Result<Matrix> {
    check_dataset(params, dataset)?;
    let k = params.k();
    let mut slopes = vec![0.0; 2 * k];
    let mut coeffs = vec![0.0; 2 * k];
    let mut total = Matrix::zeros(2 * k, params.dim());
    for ex in dataset.examples() {
        if gradient_coefficients(params, ex.x(), ex.y(), &mut slopes, &mut coeffs) {
            for (r, &c) in coeffs.iter().enumerate() {
                for (g, &xj) in total.row_mut(r).iter_mut().zip(ex.x()) {
                    *g += c * xj;
                }
            }
        }
    }
    Ok(total.scaled(1.0 / dataset.len() as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPointReport {
    /// Full-batch subgradient norm is at most `tol`.
    pub is_critical: bool,
    /// Every margin is at least `1 - tol`.
    pub is_global: bool,
    pub gradient_norm: f64,
    pub min_margin: f64,
}

pub fn critical_point_report(
    params: &NetworkParams,
    dataset: &LabeledDataset,
    tol: f64,
) -> Result<CriticalPointReport> {
    let gradient_norm = full_batch_subgradient(params, dataset)?.frobenius_norm();
    let min_margin = dataset
        .examples()
        .iter()
        .map(|ex| ex.y() * forward_unchecked(params, ex.x()))
        .fold(f64::INFINITY, f64::min);
    Ok(CriticalPointReport {
        is_critical: gradient_norm <= tol,
        is_global: min_margin >= 1.0 - tol,
        gradient_norm,
        min_margin,
    })
}

/// Values of `f(w, u) = σ(⟨w,x⟩) − σ(⟨u,x⟩)` at `(x, x)`, `(x, −x)` and their
/// midpoint `(x, 0)`. The midpoint exceeds the chord average, so the loss
/// surface is not convex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonconvexityWitness {
    pub f_a: f64,
    pub f_b: f64,
    pub f_mid: f64,
}

impl NonconvexityWitness {
    pub fn violates_convexity(&self) -> bool {
        self.f_mid > 0.5 * (self.f_a + self.f_b)
    }
}

pub fn nonconvexity_witness(x: &[f64], alpha: f64) -> Result<NonconvexityWitness> {
    let kind = Activation::leaky_relu(alpha)?;
    if norm(x) == 0.0 {
        return Err(invalid("non-convexity witness needs a nonzero x"));
    }
    let f = |w: &[f64], u: &[f64]| activation(dot(w, x), kind) - activation(dot(u, x), kind);
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let mid_u = vec![0.0; x.len()];
    Ok(NonconvexityWitness {
        f_a: f(x, x),
        f_b: f(x, &neg),
        f_mid: f(x, &mid_u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaky(alpha: f64) -> Activation {
        Activation::leaky_relu(alpha).unwrap()
    }

    fn params(rows: &[Vec<f64>], v: f64, kind: Activation) -> NetworkParams {
        NetworkParams::new(Matrix::from_rows(rows).unwrap(), v, kind).unwrap()
    }

    fn single(x: Vec<f64>, y: f64) -> LabeledDataset {
        LabeledDataset::new(vec![Example::new(x, y).unwrap()], None).unwrap()
    }

    #[test]
    fn activation_values() {
        assert!((activation(-2.0, leaky(0.1)) + 0.2).abs() < 1e-15);
        assert_eq!(activation(3.0, leaky(0.1)), 3.0);
        assert_eq!(activation(-1.0, Activation::Relu), 0.0);
    }

    #[test]
    fn zero_slope_conventions() {
        assert_eq!(slope(0.0, leaky(0.3)), 1.0);
        assert_eq!(slope(0.0, Activation::Relu), 0.0);
    }

    #[test]
    fn forward_hand_evaluation() {
        let p = params(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1.0, leaky(0.5));
        assert!((forward(&p, &[0.5, -0.5]).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn forward_zero_and_symmetric_weights() {
        let z = NetworkParams::zeros(3, 2, 0.7, leaky(0.2)).unwrap();
        assert_eq!(forward(&z, &[0.3, -0.4]).unwrap(), 0.0);
        let p = params(&[vec![0.3, -1.0], vec![0.3, -1.0]], 2.0, Activation::Relu);
        assert_eq!(forward(&p, &[0.6, 0.1]).unwrap(), 0.0);
    }

    #[test]
    fn forward_rejects_dimension_mismatch() {
        let z = NetworkParams::zeros(1, 2, 1.0, Activation::Relu).unwrap();
        assert!(matches!(forward(&z, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hinge_loss_cases() {
        let z = NetworkParams::zeros(1, 1, 1.0, leaky(0.5)).unwrap();
        assert_eq!(hinge_loss(&z, &single(vec![0.5], 1.0)).unwrap(), 1.0);
        // y·N(x) = 2
        let p = params(&[vec![2.0], vec![0.0]], 1.0, leaky(0.5));
        assert_eq!(hinge_loss(&p, &single(vec![1.0], 1.0)).unwrap(), 0.0);
        // y·N(x) = 0.3
        let p = params(&[vec![0.3], vec![0.0]], 1.0, leaky(0.5));
        assert!((hinge_loss(&p, &single(vec![1.0], 1.0)).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn inactive_example_has_zero_gradient() {
        let p = params(&[vec![1.5], vec![0.0]], 1.0, leaky(0.5));
        let r = subgradient(&p, &Example::new(vec![1.0], 1.0).unwrap()).unwrap();
        assert!(!r.active);
        assert!(r.grad.is_zero());
    }

    #[test]
    fn subgradient_hand_example() {
        let p = params(&[vec![-1.0, 0.0], vec![0.0, 0.0]], 1.0, leaky(0.5));
        let r = subgradient(&p, &Example::new(vec![1.0, 0.0], 1.0).unwrap()).unwrap();
        assert!(r.active);
        assert_eq!(r.slopes_p, vec![0.5]);
        assert_eq!(r.slopes_q, vec![1.0]);
        assert_eq!(r.grad.row(0), &[-0.5, 0.0]);
        assert_eq!(r.grad.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn relu_all_dead_is_active_with_zero_gradient() {
        let p = params(&[vec![-1.0, 0.0], vec![0.0, -1.0]], 1.0, Activation::Relu);
        let ex = Example::new(vec![0.6, 0.6], 1.0).unwrap();
        assert_eq!(margin(&p, &ex).unwrap(), 0.0);
        let r = subgradient(&p, &ex).unwrap();
        assert!(r.active);
        assert!(r.grad.is_zero());
    }

    #[test]
    fn zero_one_error_cases() {
        let ex = vec![
            Example::new(vec![0.5], 1.0).unwrap(),
            Example::new(vec![-0.5], -1.0).unwrap(),
            Example::new(vec![0.2], -1.0).unwrap(),
        ];
        let data = LabeledDataset::new(ex, None).unwrap();
        let z = NetworkParams::zeros(1, 1, 1.0, leaky(0.5)).unwrap();
        // ties predict +1, so the two negatives are wrong
        assert!((zero_one_error(&z, &data).unwrap() - 2.0 / 3.0).abs() < 1e-15);

        let p = params(&[vec![0.0], vec![0.1]], 1.0, leaky(0.5));
        assert_eq!(zero_one_error(&p, &single(vec![1.0], 1.0)).unwrap(), 1.0);
    }

    #[test]
    fn all_positive_margins_have_zero_error() {
        let ex = vec![
            Example::new(vec![0.5, 0.1], 1.0).unwrap(),
            Example::new(vec![-0.5, 0.2], -1.0).unwrap(),
        ];
        let data = LabeledDataset::new(ex, None).unwrap();
        let p = params(&[vec![1.0, 0.0], vec![-1.0, 0.0]], 1.0, leaky(0.2));
        assert_eq!(zero_one_error(&p, &data).unwrap(), 0.0);
    }

    fn margin_one_dataset() -> LabeledDataset {
        let ex = vec![
            Example::new(vec![0.5, 0.3], 1.0).unwrap(),
            Example::new(vec![-0.6, 0.1], -1.0).unwrap(),
            Example::new(vec![0.9, -0.2], 1.0).unwrap(),
        ];
        LabeledDataset::new(ex, Some(vec![2.0, 0.0])).unwrap()
    }

    #[test]
    fn scaled_separator_is_critical_and_global() {
        let data = margin_one_dataset();
        let w = data.separator().unwrap().to_vec();
        let p = params(
            &[w.iter().map(|v| 2.0 * v).collect(), w.iter().map(|v| -2.0 * v).collect()],
            1.0,
            leaky(0.3),
        );
        let r = critical_point_report(&p, &data, 1e-12).unwrap();
        assert!(r.is_critical && r.is_global);
    }

    #[test]
    fn zero_weights_are_not_critical() {
        let data = margin_one_dataset();
        let z = NetworkParams::zeros(2, 2, 1.0, leaky(0.3)).unwrap();
        let r = critical_point_report(&z, &data, 1e-12).unwrap();
        assert!(!r.is_critical && !r.is_global);
        // direct evaluation: all three examples are active with slope 1 on every row
        // (zero pre-activations), so row 0 of the mean gradient is -(v/n) Σ y x.
        let g = full_batch_subgradient(&z, &data).unwrap();
        let sum: Vec<f64> = (0..2)
            .map(|j| data.examples().iter().map(|e| e.y() * e.x()[j]).sum::<f64>())
            .collect();
        for j in 0..2 {
            assert!((g.get(0, j) + sum[j] / 3.0).abs() < 1e-15);
            assert!((g.get(3, j) - sum[j] / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn witness_values() {
        let w = nonconvexity_witness(&[0.6, 0.8], 0.5).unwrap();
        assert_eq!(w.f_a, 0.0);
        assert!((w.f_b - 1.5).abs() < 1e-15);
        assert!((w.f_mid - 1.0).abs() < 1e-15);
        assert!(w.violates_convexity());

        let w = nonconvexity_witness(&[2.0, 0.0], 0.1).unwrap();
        assert_eq!((w.f_a, w.f_mid), (0.0, 4.0));
        assert!((w.f_b - 4.4).abs() < 1e-12);
    }

    #[test]
    fn witness_rejects_zero_vector_and_bad_alpha() {
        assert!(nonconvexity_witness(&[0.0, 0.0], 0.5).is_err());
        assert!(nonconvexity_witness(&[1.0], 1.0).is_err());
    }
}
