use super::Scalar;
use crate::{Error, Result};

/// Numerically stable log-softmax (max subtraction).
pub fn log_softmax<F: Scalar>(logits: &[F]) -> Vec<F> {
    let max = logits.iter().copied().fold(F::neg_infinity(), F::max);
    let sum: F = logits.iter().map(|&l| (l - max).exp()).sum();
    let lse = max + sum.ln();
    logits.iter().map(|&l| l - lse).collect()
}

/// Cross-entropy of `softmax(logits)` against a class id.
///
/// Returns `(−log p[target], softmax − onehot(target))`.
pub fn softmax_xent<F: Scalar>(logits: &[F], target: usize) -> Result<(F, Vec<F>)> {
    if target >= logits.len() {
        return Err(Error::Input(format!(
            "target class {target} out of range for {} logits",
            logits.len()
        )));
    }
    let logp = log_softmax(logits);
    let loss = -logp[target];
    let mut d: Vec<F> = logp.iter().map(|&l| l.exp()).collect();
    d[target] -= F::one();
    Ok((loss, d))
}
