//! Contextual string embeddings from character-level LSTM language models,
//! with BiLSTM-CRF sequence tagging and GRU text classification on top.
//!
//! The crate is organised bottom-up:
//!
//! * [`numcore`]: dense tensors and the recurrent / linear layers with exact
//!   analytic backward passes, plus finite-difference gradient checking.
//! * [`textcorpus`]: character dictionaries, corpus splitting, CoNLL-U,
//!   labeled text and `.vec` readers.
//! * [`charlm`]: character language model training and perplexity.
//! * [`embed`]: contextual, static and stacked word embedders.
//! * [`tagger`]: linear-chain CRF tagger over a word-level BiLSTM.
//! * [`classifier`]: GRU sentence classifier.
//! * [`persist`]: the versioned, checksummed `CSEM` model file format.
//!
//! With the default `parallel` feature, batch-level work (per-sentence
//! gradients, evaluation, perplexity) runs on rayon. Reductions always happen
//! in a fixed chunk order, so results are bit-identical with and without the
//! feature and independent of the thread count.

pub mod charlm;
pub mod classifier;
pub mod embed;
mod error;
mod fit;
pub mod labels;
pub mod numcore;
pub(crate) mod par;
pub mod persist;
pub mod tagger;
pub mod textcorpus;

pub use error::{Error, Result};
pub use fit::{EpochLog, FitConfig};
