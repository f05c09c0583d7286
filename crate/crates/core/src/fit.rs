//! Mini-batch SGD loop shared by the downstream heads.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::charlm::AnnealSchedule;
use crate::numcore::{clip_and_step, ParamSet, Tensor};
use crate::{par, Error, Result};

/// Optimiser settings common to the tagger and the classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct FitConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub anneal_factor: f64,
    pub patience: usize,
    pub clip: f64,
}

/// Per-epoch training record.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    /// Higher-is-better selection metric: the dev score, or the negated
    /// mean training loss when there is no dev set.
    pub dev_score: f64,
    pub lr: f64,
}

/// Scores weights on held-out data, higher is better.
pub(crate) type DevScore<'a, W> = &'a mut dyn FnMut(&W) -> Result<f64>;

/// Trains `weights`, keeping the best-scoring epoch. Without a dev scorer,
/// the negated mean training loss drives both selection and annealing.
///
/// `example` adds one example's loss gradient into the buffer and returns its
/// loss. It receives the example index and the epoch so that stochastic
/// regularisers can derive their randomness deterministically.
pub(crate) fn fit<W, X, G>(
    mut weights: W,
    examples: &[X],
    cfg: &FitConfig,
    seed: u64,
    example: G,
    mut dev_score: Option<DevScore<'_, W>>,
) -> Result<(W, Vec<EpochLog>)>
where
    W: ParamSet<f32> + Send + Sync,
    X: Sync,
    G: Fn(&W, usize, usize, &X, &mut W) -> Result<f32> + Sync + Send,
{
    if examples.is_empty() {
        return Err(Error::Input("no training examples".into()));
    }
    if cfg.epochs == 0 || cfg.batch == 0 {
        return Err(Error::Input("epochs and batch must be positive".into()));
    }
    let mut schedule = AnnealSchedule::new(cfg.lr, cfg.anneal_factor, cfg.patience)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut best: Option<(f64, W)> = None;
    let mut log = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let lr = schedule.lr;
        let mut loss_sum = 0.0f64;
        for batch in order.chunks(cfg.batch) {
            let (loss, mut grads) = par::reduce(
                batch,
                || (0.0f32, weights.zeros_like()),
                |acc, _, &i| {
                    acc.0 += example(&weights, i, epoch, &examples[i], &mut acc.1)?;
                    Ok(())
                },
                |out, part| {
                    out.0 += part.0;
                    out.1.accumulate(&part.1);
                },
            )?;
            if !loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite loss {loss} in epoch {epoch} at lr {lr}"
                )));
            }
            let inv = 1.0 / batch.len() as f32;
            grads
                .tensors_mut()
                .into_iter()
                .for_each(|t: &mut Tensor<f32>| t.scale(inv));
            clip_and_step(&mut weights, &grads, lr, cfg.clip)?;
            loss_sum += loss as f64;
        }
        let train_loss = loss_sum / examples.len() as f64;
        let score = match dev_score.as_mut() {
            Some(f) => f(&weights)?,
            None => -train_loss,
        };
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, weights.clone()));
        }
        schedule.observe(-score);
        log.push(EpochLog {
            epoch,
            train_loss: loss_sum / examples.len() as f64,
            dev_score: score,
            lr,
        });
    }
    let (_, w) = best.expect("at least one epoch ran");
    Ok((w, log))
}

/// Stable per-example seed.
pub(crate) fn example_seed(seed: u64, epoch: usize, index: usize) -> u64 {
    let mut x = seed ^ 0x9E37_79B9_7F4A_7C15;
    for v in [epoch as u64, index as u64] {
        x = (x ^ v).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        x ^= x >> 31;
    }
    x
}
