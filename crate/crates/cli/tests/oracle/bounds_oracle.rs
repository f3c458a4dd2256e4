//! Stand-alone re-derivation of the three bound formulas, std only.
//!
//! The update cap is evaluated through the quadratic `a·t ≤ b·√t + c` in the
//! update count `t`, as `(b/a)² + √(c/a)·(b/a) + c/a`, rather than by summing
//! the four closed-form terms.

pub fn update_cap(norm_wstar: f64, alpha: f64, eta: f64, k: f64, v: f64, r: f64) -> f64 {
    let a = 2.0 * k * eta * v * alpha;
    let b = (4.0 * k * k * eta * eta * v * v + 4.0 * eta * k).sqrt() * norm_wstar;
    let c = 4.0 * k * r * norm_wstar;
    let ba = b / a;
    let ca = c / a;
    ba * ba + ca.sqrt() * ba + ca
}

pub fn lower_bound(norm_wstar: f64, alpha: f64, eta: f64, k: f64, v: f64, r: f64) -> f64 {
    let w = norm_wstar;
    let first = r * w / (eta * v * alpha) + f64::min(w * w / (2.0 * eta * k * v * v) - alpha * w * w, 0.0);
    let second = r * w / (eta * v) + f64::min(w * w / (2.0 * alpha * alpha * eta * k * v * v) - w * w / alpha, 0.0);
    f64::max(f64::min(first, second), w * w)
}

pub fn compression(c: f64, n: f64, delta: f64, empirical: f64) -> f64 {
    let log_term = (n / delta).ln();
    empirical + (empirical * 4.0 * c * log_term / n).sqrt() + 8.0 * c * log_term / n
}
