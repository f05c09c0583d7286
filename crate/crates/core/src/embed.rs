//! Per-word vectors: contextual (character LM states at word boundaries),
//! static table lookup, and stacking by concatenation.

use crate::charlm::{CharLm, Direction};
use crate::numcore::Tensor;
use crate::textcorpus::{Sentence, StaticWordTable, BOUNDARY_ID};
use crate::{par, Error, Result};

/// `[tokens × dim]`, one row per token.
pub type WordVectors = Tensor<f32>;

/// Contextual string embeddings from one or two frozen character LMs.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextualEmbedder {
    forward: CharLm,
    backward: Option<CharLm>,
}

impl ContextualEmbedder {
    pub fn new(forward: CharLm, backward: Option<CharLm>) -> Result<Self> {
        if forward.direction() != Direction::Forward {
            return Err(Error::Data(
                "the first contextual model must be a forward LM".into(),
            ));
        }
        if let Some(b) = &backward {
            if b.direction() != Direction::Backward {
                return Err(Error::Data(
                    "the second contextual model must be a backward LM".into(),
                ));
            }
            if b.dict != forward.dict {
                return Err(Error::Data(
                    "forward and backward LMs use different character dictionaries".into(),
                ));
            }
        }
        Ok(ContextualEmbedder { forward, backward })
    }

    pub fn forward_lm(&self) -> &CharLm {
        &self.forward
    }

    pub fn backward_lm(&self) -> Option<&CharLm> {
        self.backward.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.forward.hidden_size() + self.backward.as_ref().map_or(0, |b| b.hidden_size())
    }

    /// The stream is a boundary symbol followed by the space-joined tokens.
    /// A token's forward vector is the top hidden state right after its last
    /// character; its backward vector is the backward LM's state right after
    /// (in reversed reading order) its first character.
    pub fn embed(&self, s: &Sentence) -> Result<WordVectors> {
        let text = s.text();
        let chars: Vec<u32> = self.forward.dict.encode(&text);
        // [start, end) of each token in `chars`
        let mut spans = Vec::with_capacity(s.len());
        let mut pos = 0;
        for t in s.tokens() {
            let n = t.chars().count();
            spans.push((pos, pos + n));
            pos += n + 1;
        }

        let mut ids = Vec::with_capacity(chars.len() + 1);
        ids.push(BOUNDARY_ID);
        ids.extend_from_slice(&chars);
        let fwd = self
            .forward
            .top_states(&ids, &mut self.forward.zero_state())?;
        // state after chars[p] sits at fwd[p + 1]
        let bwd = match &self.backward {
            Some(b) => {
                let mut rev = vec![BOUNDARY_ID];
                rev.extend(chars.iter().rev());
                Some(b.top_states(&rev, &mut b.zero_state())?)
            }
            None => None,
        };

        let dim = self.dim();
        let mut out = Vec::with_capacity(s.len() * dim);
        for &(start, end) in &spans {
            out.extend_from_slice(&fwd[end]);
            if let Some(bwd) = &bwd {
                // chars[p] is consumed at reversed position len-1-p, state at +1
                out.extend_from_slice(&bwd[chars.len() - start]);
            }
        }
        Tensor::matrix(s.len(), dim, out)
    }
}

/// Exact-match lookup; out-of-vocabulary words get the zero vector.
pub fn embed_static(table: &StaticWordTable, s: &Sentence) -> Result<WordVectors> {
    let dim = table.dim();
    let mut out = Vec::with_capacity(s.len() * dim);
    for t in s.tokens() {
        match table.get(t) {
            Some(v) => out.extend_from_slice(v),
            None => out.extend(std::iter::repeat_n(0.0, dim)),
        }
    }
    Tensor::matrix(s.len(), dim, out)
}

pub fn embed_contextual(e: &ContextualEmbedder, s: &Sentence) -> Result<WordVectors> {
    e.embed(s)
}

#[derive(Clone, Debug, PartialEq)]
pub enum EmbedderPart {
    Contextual(ContextualEmbedder),
    Static(StaticWordTable),
}

impl EmbedderPart {
    pub fn dim(&self) -> usize {
        match self {
            EmbedderPart::Contextual(c) => c.dim(),
            EmbedderPart::Static(t) => t.dim(),
        }
    }

    pub fn embed(&self, s: &Sentence) -> Result<WordVectors> {
        match self {
            EmbedderPart::Contextual(c) => c.embed(s),
            EmbedderPart::Static(t) => embed_static(t, s),
        }
    }
}

/// Ordered concatenation of embedders.
#[derive(Clone, Debug, PartialEq)]
pub struct StackedEmbedder {
    parts: Vec<EmbedderPart>,
}

impl StackedEmbedder {
    pub fn new(parts: Vec<EmbedderPart>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Input(
                "a stacked embedder needs at least one part".into(),
            ));
        }
        Ok(StackedEmbedder { parts })
    }

    pub fn parts(&self) -> &[EmbedderPart] {
        &self.parts
    }

    pub fn dim(&self) -> usize {
        self.parts.iter().map(EmbedderPart::dim).sum()
    }

    pub fn embed(&self, s: &Sentence) -> Result<WordVectors> {
        if self.parts.len() == 1 {
            return self.parts[0].embed(s);
        }
        let pieces = self
            .parts
            .iter()
            .map(|p| p.embed(s))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::with_capacity(s.len() * self.dim());
        for i in 0..s.len() {
            for p in &pieces {
                out.extend_from_slice(p.row(i));
            }
        }
        Tensor::matrix(s.len(), self.dim(), out)
    }

    /// Embeds many sentences, in parallel when enabled.
    pub fn embed_all(&self, sentences: &[&Sentence]) -> Result<Vec<WordVectors>> {
        par::map(sentences, |_, s| self.embed(s))
            .into_iter()
            .collect()
    }
}

pub fn embed_stacked(e: &StackedEmbedder, s: &Sentence) -> Result<WordVectors> {
    e.embed(s)
}
