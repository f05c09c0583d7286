use super::CharLm;
use crate::numcore::{log_softmax, Scalar};
use crate::textcorpus::BOUNDARY_ID;
use crate::{par, Error, Result};

/// Summed next-character negative log-likelihood (natural log) of one line
/// read from a fresh state after a boundary symbol, and the number of
/// predicted characters.
pub fn line_nll<F: Scalar>(model: &CharLm<F>, line: &str) -> Result<(f64, usize)> {
    let chars = model.encode_line(line);
    if chars.is_empty() {
        return Ok((0.0, 0));
    }
    let mut inputs = Vec::with_capacity(chars.len());
    inputs.push(BOUNDARY_ID);
    inputs.extend_from_slice(&chars[..chars.len() - 1]);
    let states = model.top_states(&inputs, &mut model.zero_state())?;
    let mut nll = 0.0;
    for (h, &target) in states.iter().zip(&chars) {
        let logits: Vec<f64> = model.logits(h)?.into_iter().map(Scalar::as_f64).collect();
        nll -= log_softmax(&logits)[target as usize];
    }
    Ok((nll, chars.len()))
}

/// `exp(mean per-character NLL)` over all lines.
///
/// Lines are scored independently, so the work is spread over threads; the
/// per-line sums are combined in input order.
pub fn perplexity<F: Scalar, S: AsRef<str> + Sync>(model: &CharLm<F>, lines: &[S]) -> Result<f64> {
    let parts = par::map(lines, |_, l| line_nll(model, l.as_ref()));
    let (mut nll, mut count) = (0.0f64, 0usize);
    for p in parts {
        let (n, c) = p?;
        nll += n;
        count += c;
    }
    if count == 0 {
        return Err(Error::Input(
            "perplexity of an empty text is undefined".into(),
        ));
    }
    Ok((nll / count as f64).exp())
}
