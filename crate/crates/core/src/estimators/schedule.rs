//! Hyperparameter schedules driven by the rate analysis.

/// `k_n = ⌊k₀ · n^{2β/(2β+1)}⌋`, clamped to `1..=n`.
pub fn knn_schedule(n: usize, k0: f64, beta: f64) -> usize {
    let exponent = 2.0 * beta / (2.0 * beta + 1.0);
    let v = k0 * (n as f64).powf(exponent);
    // absorb round-off such as 1000^{2/3} = 99.99999999999997
    let raw = (v + 1e-9 * v.max(1.0)).floor();
    (raw.max(1.0) as usize).min(n.max(1))
}

/// `λ_n = λ₀ · n^{−1/(2q+σ)}`.
pub fn krr_schedule(n: usize, lambda0: f64, q: f64, sigma: f64) -> f64 {
    lambda0 * (n as f64).powf(-1.0 / (2.0 * q + sigma))
}
