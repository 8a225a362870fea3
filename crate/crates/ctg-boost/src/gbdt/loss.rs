//! Multiclass softmax loss: probabilities, gradients, Hessians.

/// Per-sample Hessians are clamped to at least this value so leaf-value
/// denominators never collapse when a probability saturates.
pub const HESSIAN_FLOOR: f64 = 1e-16;

/// Numerically stable softmax (max-subtraction before exponentiation).
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// First and second derivatives of the softmax cross-entropy at `scores`
/// for a sample with true class `label`: `g_k = p_k - [k = label]`,
/// `h_k = max(p_k (1 - p_k), HESSIAN_FLOOR)`.
///
/// Gradients always lie in `[-1, 1]` and Hessians in `(0, 0.25]`.
pub fn softmax_gradients(scores: &[f64], label: u8) -> (Vec<f64>, Vec<f64>) {
    let p = softmax(scores);
    let g = p
        .iter()
        .enumerate()
        .map(|(k, &pk)| pk - if k == label as usize { 1.0 } else { 0.0 })
        .collect();
    let h = p.iter().map(|&pk| (pk * (1.0 - pk)).max(HESSIAN_FLOOR)).collect();
    (g, h)
}

/// Softmax cross-entropy `-ln p_label`, evaluated in log space so large
/// score gaps cannot overflow.
pub fn cross_entropy(scores: &[f64], label: u8) -> f64 {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum: f64 = scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    -(scores[label as usize] - max - log_sum)
}
