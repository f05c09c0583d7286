//! BiLSTM-CRF part-of-speech tagger.

pub mod crf;
mod model;
mod report;
mod train;

pub use crf::{crf_nll, viterbi, CrfOutput};
pub use model::{CrfTagger, TagSet, TaggerConfig, TaggerWeights};
pub use report::{TagReport, TagRow};
pub use train::{evaluate_tagger, train_tagger};
