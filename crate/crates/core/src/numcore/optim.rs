use super::{ParamSet, Scalar};
use crate::{Error, Result};

/// Diagnostics from one optimiser step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepStats {
    /// Global gradient norm before clipping.
    pub grad_norm: f64,
    /// Factor applied to the gradient (1 when not clipped).
    pub clip_scale: f64,
}

/// Plain SGD with global-norm clipping. Zeroes `grads` afterwards.
///
/// `clip` may be `f64::INFINITY` to disable clipping.
pub fn sgd_step<F: Scalar, P: ParamSet<F>>(
    params: &mut P,
    grads: &mut P,
    lr: f64,
    clip: f64,
) -> Result<StepStats> {
    let stats = clip_and_step(params, grads, lr, clip)?;
    grads.zero();
    Ok(stats)
}

/// Same as [`sgd_step`] without zeroing the gradient buffer.
pub fn clip_and_step<F: Scalar, P: ParamSet<F>>(
    params: &mut P,
    grads: &P,
    lr: f64,
    clip: f64,
) -> Result<StepStats> {
    if !(lr > 0.0) {
        return Err(Error::Input(format!(
            "learning rate must be positive, got {lr}"
        )));
    }
    let norm = grads
        .tensors()
        .iter()
        .map(|t| t.sq_norm())
        .sum::<f64>()
        .sqrt();
    if !norm.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite gradient norm ({norm}) at lr {lr}"
        )));
    }
    let clip_scale = if norm > clip { clip / norm } else { 1.0 };
    let alpha = F::of(-lr * clip_scale);
    for (p, g) in params.tensors_mut().into_iter().zip(grads.tensors()) {
        p.axpy(alpha, g);
    }
    Ok(StepStats {
        grad_norm: norm,
        clip_scale,
    })
}
