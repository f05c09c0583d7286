//! Character-level LSTM language model.
//!
//! Training streams lines joined by the boundary id, cut into `batch`
//! contiguous rows and walked in `seq_len` windows. Hidden state carries from
//! one window to the next within a shard, but gradients stop at the window
//! edge. After each shard the validation perplexity is measured and fed to
//! the [`AnnealSchedule`].

mod config;
mod eval;
mod model;
mod schedule;
mod step;
mod train;

pub use config::{CharLmConfig, Direction};
pub use eval::{line_nll, perplexity};
pub use model::{CharLm, CharLmWeights, LmState};
pub use schedule::{AnnealSchedule, IMPROVEMENT_EPS};
pub use step::{batchify, lm_step, LmStepOutput};
pub use train::{train_lm, train_lm_with, LmCheckpoint, LmTrainLog};
