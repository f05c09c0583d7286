use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{batchify, lm_step, perplexity, AnnealSchedule, CharLm, CharLmConfig};
use crate::numcore::{clip_and_step, Scalar};
use crate::textcorpus::CharDictionary;
use crate::{Error, Result};

/// One validation checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct LmCheckpoint {
    /// Optimiser steps taken so far.
    pub step: usize,
    /// Mean training loss over the shard; `None` for the initial checkpoint.
    pub train_loss: Option<f64>,
    pub valid_ppl: f64,
    /// Learning rate in effect while training the shard.
    pub lr: f64,
}

impl LmCheckpoint {
    /// `step\tloss\tppl\tlr`, with `NA` for a missing loss.
    pub fn tsv_line(&self) -> String {
        let loss = self
            .train_loss
            .map_or_else(|| "NA".to_owned(), |l| format!("{l}"));
        format!("{}\t{}\t{}\t{}", self.step, loss, self.valid_ppl, self.lr)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LmTrainLog {
    pub checkpoints: Vec<LmCheckpoint>,
}

impl LmTrainLog {
    pub const TSV_HEADER: &'static str = "step\tloss\tppl\tlr";

    pub fn to_tsv(&self) -> String {
        let mut s = String::from(Self::TSV_HEADER);
        s.push('\n');
        for c in &self.checkpoints {
            let _ = writeln!(s, "{}", c.tsv_line());
        }
        s
    }

    pub fn best_ppl(&self) -> Option<f64> {
        self.checkpoints
            .iter()
            .map(|c| c.valid_ppl)
            .min_by(f64::total_cmp)
    }
}

pub fn train_lm<F: Scalar>(
    config: &CharLmConfig,
    dict: CharDictionary,
    train: &[String],
    valid: &[String],
    seed: u64,
) -> Result<(CharLm<F>, LmTrainLog)> {
    train_lm_with(config, dict, train, valid, seed, |_| {})
}

/// Like [`train_lm`], calling `on_checkpoint` as each checkpoint is logged.
///
/// The returned model carries the weights of the best validation checkpoint.
pub fn train_lm_with<F: Scalar>(
    config: &CharLmConfig,
    dict: CharDictionary,
    train: &[String],
    valid: &[String],
    seed: u64,
    mut on_checkpoint: impl FnMut(&LmCheckpoint),
) -> Result<(CharLm<F>, LmTrainLog)> {
    config.validate()?;
    if train.iter().all(|l| l.is_empty()) || valid.iter().all(|l| l.is_empty()) {
        return Err(Error::Input(
            "training and validation text must be non-empty".into(),
        ));
    }
    let mut model = CharLm::<F>::new(config.clone(), dict, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let shards: Vec<Vec<u32>> = train
        .chunks(config.shard_lines)
        .map(|s| model.training_stream(s))
        .collect();

    let mut log = LmTrainLog::default();
    let mut schedule = AnnealSchedule::new(config.lr0, config.anneal_factor, config.patience)?;
    let initial = perplexity(&model, valid)?;
    schedule.observe(initial);
    let mut best = (initial, model.weights.clone());
    let first = LmCheckpoint {
        step: 0,
        train_loss: None,
        valid_ppl: initial,
        lr: schedule.lr,
    };
    on_checkpoint(&first);
    log.checkpoints.push(first);

    let mut step = 0usize;
    let mut order: Vec<usize> = (0..shards.len()).collect();
    for _epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for &si in &order {
            let lr = schedule.lr;
            let windows = batchify(&shards[si], config.batch, config.seq_len);
            if windows.is_empty() {
                continue;
            }
            let mut carry = vec![model.zero_state(); windows[0].len()];
            let mut loss_sum = 0.0;
            for w in &windows {
                let out = lm_step(&model, w, &carry)?;
                let loss = out.loss.as_f64();
                if !loss.is_finite() {
                    return Err(Error::Numeric(format!(
                        "non-finite loss {loss} at step {step}, lr {lr}"
                    )));
                }
                clip_and_step(&mut model.weights, &out.grads, lr, config.clip)
                    .map_err(|e| Error::Numeric(format!("{e} (step {step})")))?;
                carry = out.carry;
                loss_sum += loss;
                step += 1;
            }
            let ppl = perplexity(&model, valid)?;
            if !ppl.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite validation perplexity at step {step}, lr {lr}"
                )));
            }
            if ppl < best.0 {
                best = (ppl, model.weights.clone());
            }
            schedule.observe(ppl);
            let cp = LmCheckpoint {
                step,
                train_loss: Some(loss_sum / windows.len() as f64),
                valid_ppl: ppl,
                lr,
            };
            on_checkpoint(&cp);
            log.checkpoints.push(cp);
        }
    }
    model.weights = best.1;
    Ok((model, log))
}
