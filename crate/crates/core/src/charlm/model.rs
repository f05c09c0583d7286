use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CharLmConfig, Direction};
use crate::numcore::{
    linear_forward, lstm_cell, LinearParams, LstmParams, ParamSet, Scalar, Tensor,
};
use crate::textcorpus::{CharDictionary, BOUNDARY_ID};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CharLmWeights<F = f32> {
    /// `[V × E]`
    pub embedding: Tensor<F>,
    pub layers: Vec<LstmParams<F>>,
    /// `[V × H]`
    pub output: LinearParams<F>,
}

impl<F: Scalar> ParamSet<F> for CharLmWeights<F> {
    fn tensors(&self) -> Vec<&Tensor<F>> {
        let mut v = vec![&self.embedding];
        for l in &self.layers {
            v.extend(l.tensors());
        }
        v.extend(self.output.tensors());
        v
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor<F>> {
        let mut v = vec![&mut self.embedding];
        for l in &mut self.layers {
            v.extend(l.tensors_mut());
        }
        v.extend(self.output.tensors_mut());
        v
    }
}

/// Recurrent state of every layer.
#[derive(Clone, Debug, PartialEq)]
pub struct LmState<F = f32> {
    pub h: Vec<Vec<F>>,
    pub c: Vec<Vec<F>>,
}

impl<F: Scalar> LmState<F> {
    pub fn zeros(layers: usize, hidden: usize) -> Self {
        LmState {
            h: vec![vec![F::zero(); hidden]; layers],
            c: vec![vec![F::zero(); hidden]; layers],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharLm<F = f32> {
    pub config: CharLmConfig,
    pub dict: CharDictionary,
    pub weights: CharLmWeights<F>,
}

impl<F: Scalar> CharLm<F> {
    /// Seeded uniform initialisation in `±1/√hidden`.
    pub fn new(config: CharLmConfig, dict: CharDictionary, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (v, e, h) = (dict.len(), config.char_embed_dim, config.hidden);
        let bound = 1.0 / (h as f64).sqrt();
        let embedding = Tensor::uniform(&[v, e], bound, &mut rng);
        let layers = (0..config.layers)
            .map(|l| LstmParams::new(if l == 0 { e } else { h }, h, &mut rng))
            .collect();
        let output = LinearParams::new(h, v, &mut rng);
        Ok(CharLm {
            config,
            dict,
            weights: CharLmWeights {
                embedding,
                layers,
                output,
            },
        })
    }

    pub fn from_parts(
        config: CharLmConfig,
        dict: CharDictionary,
        weights: CharLmWeights<F>,
    ) -> Result<Self> {
        let (v, e, h) = (dict.len(), config.char_embed_dim, config.hidden);
        let w = &weights;
        let mut ok = w.embedding.shape() == [v, e]
            && w.layers.len() == config.layers
            && w.output.input_size() == h
            && w.output.output_size() == v;
        for (l, p) in w.layers.iter().enumerate() {
            ok &= p.hidden_size() == h && p.input_size() == if l == 0 { e } else { h };
        }
        if !ok {
            return Err(Error::shape(
                "language model weights do not match config and dictionary",
            ));
        }
        Ok(CharLm {
            config,
            dict,
            weights,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.dict.len()
    }

    pub fn hidden_size(&self) -> usize {
        self.config.hidden
    }

    pub fn direction(&self) -> Direction {
        self.config.direction
    }

    /// Character ids of one line in reading direction.
    pub fn encode_line(&self, line: &str) -> Vec<u32> {
        let mut ids = self.dict.encode(line);
        if self.config.direction == Direction::Backward {
            ids.reverse();
        }
        ids
    }

    /// Boundary, then every line followed by a boundary, in reading order.
    pub fn training_stream<S: AsRef<str>>(&self, lines: &[S]) -> Vec<u32> {
        let mut ids = vec![BOUNDARY_ID];
        for line in lines {
            ids.extend(self.dict.encode(line.as_ref()));
            ids.push(BOUNDARY_ID);
        }
        if self.config.direction == Direction::Backward {
            ids.reverse();
        }
        ids
    }

    pub(crate) fn check_ids(&self, ids: &[u32]) -> Result<()> {
        let v = self.vocab_size() as u32;
        match ids.iter().find(|&&i| i >= v) {
            Some(bad) => Err(Error::Input(format!(
                "character id {bad} out of range for vocabulary of {v}"
            ))),
            None => Ok(()),
        }
    }

    /// Advances `state` over `ids` and returns the top-layer hidden state
    /// after each character.
    pub fn top_states(&self, ids: &[u32], state: &mut LmState<F>) -> Result<Vec<Vec<F>>> {
        self.check_ids(ids)?;
        let mut out = Vec::with_capacity(ids.len());
        for &id in ids {
            let mut x = self.weights.embedding.row(id as usize).to_vec();
            for (l, p) in self.weights.layers.iter().enumerate() {
                let s = lstm_cell(&x, &state.h[l], &state.c[l], p)?;
                state.c[l] = s.c;
                state.h[l] = s.h;
                x = state.h[l].clone();
            }
            out.push(x);
        }
        Ok(out)
    }

    /// Next-character logits from a top-layer hidden state.
    pub fn logits(&self, h: &[F]) -> Result<Vec<F>> {
        linear_forward(&self.weights.output, h)
    }

    pub fn zero_state(&self) -> LmState<F> {
        LmState::zeros(self.config.layers, self.config.hidden)
    }
}
