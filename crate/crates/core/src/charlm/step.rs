use super::{CharLm, CharLmWeights, LmState};
use crate::numcore::{
    add_into, linear_backward, linear_forward, lstm_cell, lstm_cell_backward, softmax_xent,
    LstmStep, ParamSet, Scalar,
};
use crate::{par, Error, Result};

/// Cuts a stream into at most `batch` contiguous rows of equal length and
/// walks them in windows of `seq_len + 1` ids.
///
/// Consecutive windows overlap by one id: the last target of one window is
/// the first input of the next. Returns windows in order, each a batch of rows.
pub fn batchify(stream: &[u32], batch: usize, seq_len: usize) -> Vec<Vec<Vec<u32>>> {
    let n = stream.len();
    if n < 2 {
        return Vec::new();
    }
    let rows = batch.min(n / 2).max(1);
    let row_len = n / rows;
    let mut windows = Vec::new();
    let mut start = 0;
    while start + 1 < row_len {
        let end = (start + seq_len + 1).min(row_len);
        windows.push(
            (0..rows)
                .map(|r| stream[r * row_len + start..r * row_len + end].to_vec())
                .collect(),
        );
        start += seq_len;
    }
    windows
}

pub struct LmStepOutput<F> {
    /// Mean next-character cross-entropy over the batch.
    pub loss: F,
    pub grads: CharLmWeights<F>,
    pub carry: Vec<LmState<F>>,
}

struct RowResult<F> {
    loss_sum: F,
    carry: LmState<F>,
}

/// One truncated-BPTT step.
///
/// Each row predicts ids `1..` from ids `..len-1`, starting from its carry-in
/// state. Gradients do not flow into the carry-in.
pub fn lm_step<F: Scalar>(
    model: &CharLm<F>,
    rows: &[Vec<u32>],
    carry: &[LmState<F>],
) -> Result<LmStepOutput<F>> {
    if rows.is_empty() || rows.len() != carry.len() {
        return Err(Error::Input(format!(
            "{} rows with {} carry states",
            rows.len(),
            carry.len()
        )));
    }
    for r in rows {
        if r.len() < 2 {
            return Err(Error::Input("every row needs at least two ids".into()));
        }
        model.check_ids(r)?;
    }
    let predictions: usize = rows.iter().map(|r| r.len() - 1).sum();
    let scale = F::one() / F::of(predictions as f64);
    let inputs: Vec<(&Vec<u32>, &LmState<F>)> = rows.iter().zip(carry).collect();

    let (loss_sum, grads, results) = par::reduce(
        &inputs,
        || (F::zero(), model.weights.zeros_like(), Vec::new()),
        |acc, _, (row, state)| {
            let r = row_step(model, row, state, scale, &mut acc.1)?;
            acc.0 += r.loss_sum;
            acc.2.push(r.carry);
            Ok(())
        },
        |out, part: (F, CharLmWeights<F>, Vec<LmState<F>>)| {
            out.0 += part.0;
            out.1.accumulate(&part.1);
            out.2.extend(part.2);
        },
    )?;
    Ok(LmStepOutput {
        loss: loss_sum * scale,
        grads,
        carry: results,
    })
}

fn row_step<F: Scalar>(
    model: &CharLm<F>,
    row: &[u32],
    init: &LmState<F>,
    scale: F,
    grads: &mut CharLmWeights<F>,
) -> Result<RowResult<F>> {
    let w = &model.weights;
    let layers = w.layers.len();
    let hs = model.hidden_size();
    let steps = row.len() - 1;

    let mut state = init.clone();
    let mut caches: Vec<Vec<LstmStep<F>>> = Vec::with_capacity(steps);
    let mut dlogits: Vec<Vec<F>> = Vec::with_capacity(steps);
    let mut loss_sum = F::zero();
    for t in 0..steps {
        let mut x = w.embedding.row(row[t] as usize).to_vec();
        let mut per_layer = Vec::with_capacity(layers);
        for (l, p) in w.layers.iter().enumerate() {
            let s = lstm_cell(&x, &state.h[l], &state.c[l], p)?;
            state.h[l] = s.h.clone();
            state.c[l] = s.c.clone();
            x = s.h.clone();
            per_layer.push(s);
        }
        let logits = linear_forward(&w.output, &x)?;
        let (loss, mut d) = softmax_xent(&logits, row[t + 1] as usize)?;
        loss_sum += loss;
        d.iter_mut().for_each(|v| *v *= scale);
        dlogits.push(d);
        caches.push(per_layer);
    }

    let mut dh_next = vec![vec![F::zero(); hs]; layers];
    let mut dc_next = vec![vec![F::zero(); hs]; layers];
    for t in (0..steps).rev() {
        let top = &caches[t][layers - 1];
        let mut dh = linear_backward(&w.output, &top.h, &dlogits[t], &mut grads.output)?;
        for l in (0..layers).rev() {
            add_into(&mut dh, &dh_next[l]);
            let (dx, dhp, dcp) = lstm_cell_backward(
                &caches[t][l],
                &dh,
                &dc_next[l],
                &w.layers[l],
                &mut grads.layers[l],
            )?;
            dh_next[l] = dhp;
            dc_next[l] = dcp;
            dh = dx;
        }
        add_into(grads.embedding.row_mut(row[t] as usize), &dh);
    }
    Ok(RowResult {
        loss_sum,
        carry: state,
    })
}
