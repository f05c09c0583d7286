use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            _ => Err(Error::Input(format!(
                "direction must be forward or backward, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// Language model hyperparameters. `Default` gives desk-scale values;
/// [`CharLmConfig::paper`] the full-scale recipe.
#[derive(Clone, Debug, PartialEq)]
pub struct CharLmConfig {
    pub char_embed_dim: usize,
    pub hidden: usize,
    pub layers: usize,
    pub seq_len: usize,
    pub batch: usize,
    pub lr0: f64,
    pub anneal_factor: f64,
    /// Checkpoints without improvement before the learning rate is divided.
    pub patience: usize,
    pub epochs: usize,
    pub direction: Direction,
    /// Global gradient-norm clip.
    pub clip: f64,
    /// Lines per shard; one checkpoint per shard.
    pub shard_lines: usize,
}

impl Default for CharLmConfig {
    fn default() -> Self {
        CharLmConfig {
            char_embed_dim: 100,
            hidden: 64,
            layers: 1,
            seq_len: 50,
            batch: 16,
            lr0: 20.0,
            anneal_factor: 4.0,
            patience: 25,
            epochs: 10,
            direction: Direction::Forward,
            clip: 0.25,
            shard_lines: 50,
        }
    }
}

impl CharLmConfig {
    pub fn paper() -> Self {
        CharLmConfig {
            hidden: 1024,
            seq_len: 250,
            batch: 100,
            shard_lines: 100_000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ints = [
            ("char_embed_dim", self.char_embed_dim),
            ("hidden", self.hidden),
            ("layers", self.layers),
            ("seq_len", self.seq_len),
            ("batch", self.batch),
            ("patience", self.patience),
            ("epochs", self.epochs),
            ("shard_lines", self.shard_lines),
        ];
        if let Some((name, _)) = ints.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Input(format!("{name} must be positive")));
        }
        if !(self.lr0 > 0.0) || !(self.clip > 0.0) {
            return Err(Error::Input("lr0 and clip must be positive".into()));
        }
        if !(self.anneal_factor > 1.0) {
            return Err(Error::Input(format!(
                "anneal_factor must exceed 1, got {}",
                self.anneal_factor
            )));
        }
        Ok(())
    }
}
