use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::crf;
use crate::embed::StackedEmbedder;
use crate::fit::FitConfig;
use crate::labels::LabelIndex;
use crate::numcore::{
    add_into, linear_backward, linear_forward, lstm_backward_impl, lstm_cell, LinearParams,
    LstmParams, LstmStep, ParamSet, Scalar, Tensor,
};
use crate::textcorpus::{Sentence, TaggedSentence};
use crate::{Error, Result};

/// Tag inventory. Ids `0..K`; START (`K`) and STOP (`K+1`) exist only as
/// transition indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagSet {
    index: LabelIndex,
}

impl TagSet {
    pub fn new(index: LabelIndex) -> Result<Self> {
        if index.is_empty() {
            return Err(Error::Data("tag set is empty".into()));
        }
        Ok(TagSet { index })
    }

    /// Tags in order of first appearance.
    pub fn from_sentences(sentences: &[TaggedSentence]) -> Result<Self> {
        let mut index = LabelIndex::new();
        for s in sentences {
            for t in &s.tags {
                index.insert(t.as_str());
            }
        }
        Self::new(index)
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, tag: &str) -> Option<usize> {
        self.index.id(tag)
    }

    pub fn name(&self, id: usize) -> &str {
        self.index.name(id)
    }

    pub fn names(&self) -> &[String] {
        self.index.names()
    }

    pub fn start(&self) -> usize {
        crf::start_id(self.len())
    }

    pub fn stop(&self) -> usize {
        crf::stop_id(self.len())
    }

    /// Tag ids of a sentence; unknown tags are a data error naming the tag
    /// and the sentence.
    pub fn encode(&self, s: &TaggedSentence, sentence_no: usize) -> Result<Vec<usize>> {
        s.tags
            .iter()
            .map(|t| {
                self.id(t).ok_or_else(|| {
                    Error::Data(format!(
                        "unknown tag {t:?} in sentence {sentence_no} ({:?})",
                        s.sentence.text()
                    ))
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaggerConfig {
    /// Hidden size of each LSTM direction.
    pub hidden: usize,
    /// Probability of zeroing a whole word vector during training.
    pub word_dropout: f64,
    pub fit: FitConfig,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        TaggerConfig {
            hidden: 64,
            word_dropout: 0.05,
            fit: FitConfig {
                lr: 0.1,
                epochs: 50,
                batch: 8,
                anneal_factor: 2.0,
                patience: 3,
                clip: 5.0,
            },
        }
    }
}

impl TaggerConfig {
    pub fn paper() -> Self {
        let d = Self::default();
        TaggerConfig {
            hidden: 256,
            fit: FitConfig {
                epochs: 200,
                batch: 32,
                ..d.fit
            },
            ..d
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaggerWeights<F = f32> {
    pub fwd: LstmParams<F>,
    pub bwd: LstmParams<F>,
    /// `[K × 2H]`
    pub proj: LinearParams<F>,
    /// `[(K+2) × (K+2)]`
    pub transitions: Tensor<F>,
}

impl<F: Scalar> ParamSet<F> for TaggerWeights<F> {
    fn tensors(&self) -> Vec<&Tensor<F>> {
        let mut v = self.fwd.tensors();
        v.extend(self.bwd.tensors());
        v.extend(self.proj.tensors());
        v.push(&self.transitions);
        v
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor<F>> {
        let mut v = self.fwd.tensors_mut();
        v.extend(self.bwd.tensors_mut());
        v.extend(self.proj.tensors_mut());
        v.push(&mut self.transitions);
        v
    }
}

pub(crate) struct EmissionCache<F> {
    fwd: Vec<LstmStep<F>>,
    bwd: Vec<LstmStep<F>>,
    concat: Vec<Vec<F>>,
}

impl<F: Scalar> TaggerWeights<F> {
    pub fn new(input: usize, hidden: usize, num_tags: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut transitions = Tensor::zeros(&[num_tags + 2, num_tags + 2]);
        crf::mask_transitions(&mut transitions);
        TaggerWeights {
            fwd: LstmParams::new(input, hidden, &mut rng),
            bwd: LstmParams::new(input, hidden, &mut rng),
            proj: LinearParams::new(2 * hidden, num_tags, &mut rng),
            transitions,
        }
    }

    pub fn input_size(&self) -> usize {
        self.fwd.input_size()
    }

    pub fn num_tags(&self) -> usize {
        self.proj.output_size()
    }

    pub(crate) fn emissions_cached(
        &self,
        feats: &Tensor<F>,
    ) -> Result<(Tensor<F>, EmissionCache<F>)> {
        if feats.rank() != 2 || feats.cols() != self.input_size() {
            return Err(Error::shape(format!(
                "tagger expects n×{} features, got {:?}",
                self.input_size(),
                feats.shape()
            )));
        }
        let n = feats.rows();
        let hs = self.fwd.hidden_size();
        let run = |p: &LstmParams<F>,
                   order: &mut dyn Iterator<Item = usize>|
         -> Result<Vec<LstmStep<F>>> {
            let (mut h, mut c) = (vec![F::zero(); hs], vec![F::zero(); hs]);
            let mut steps = Vec::with_capacity(n);
            for t in order {
                let s = lstm_cell(feats.row(t), &h, &c, p)?;
                h.clone_from(&s.h);
                c.clone_from(&s.c);
                steps.push(s);
            }
            Ok(steps)
        };
        let fwd = run(&self.fwd, &mut (0..n))?;
        // bwd[j] holds position n-1-j
        let bwd = run(&self.bwd, &mut (0..n).rev())?;
        let mut concat = Vec::with_capacity(n);
        let mut em = Vec::with_capacity(n * self.num_tags());
        for t in 0..n {
            let mut z = fwd[t].h.clone();
            z.extend_from_slice(&bwd[n - 1 - t].h);
            em.extend(linear_forward(&self.proj, &z)?);
            concat.push(z);
        }
        Ok((
            Tensor::matrix(n, self.num_tags(), em)?,
            EmissionCache { fwd, bwd, concat },
        ))
    }

    pub fn emissions(&self, feats: &Tensor<F>) -> Result<Tensor<F>> {
        Ok(self.emissions_cached(feats)?.0)
    }

    /// CRF negative log-likelihood of `gold`; gradients accumulate into `grads`.
    pub fn loss_and_grad(&self, feats: &Tensor<F>, gold: &[usize], grads: &mut Self) -> Result<F> {
        let (em, cache) = self.emissions_cached(feats)?;
        let out = crf::crf_nll(&em, &self.transitions, gold)?;
        grads.transitions.add_assign(&out.d_transitions);

        let n = em.rows();
        let hs = self.fwd.hidden_size();
        let mut dh_f = Vec::with_capacity(n);
        let mut dh_b = Vec::with_capacity(n);
        for t in 0..n {
            let dz = linear_backward(
                &self.proj,
                &cache.concat[t],
                out.d_emissions.row(t),
                &mut grads.proj,
            )?;
            dh_f.push(dz[..hs].to_vec());
            dh_b.push(dz[hs..].to_vec());
        }
        let bptt = |p: &LstmParams<F>,
                    g: &mut LstmParams<F>,
                    steps: &[LstmStep<F>],
                    dh_at: &dyn Fn(usize) -> Vec<F>|
         -> Result<()> {
            let (mut dh_next, mut dc_next) = (vec![F::zero(); hs], vec![F::zero(); hs]);
            for j in (0..steps.len()).rev() {
                let mut dh = dh_at(j);
                add_into(&mut dh, &dh_next);
                let (_, dhp, dcp) = lstm_backward_impl(&steps[j], &dh, &dc_next, p, g, false)?;
                dh_next = dhp;
                dc_next = dcp;
            }
            Ok(())
        };
        bptt(&self.fwd, &mut grads.fwd, &cache.fwd, &|j| dh_f[j].clone())?;
        bptt(&self.bwd, &mut grads.bwd, &cache.bwd, &|j| {
            dh_b[n - 1 - j].clone()
        })?;
        Ok(out.loss)
    }

    pub fn decode(&self, feats: &Tensor<F>) -> Result<Vec<usize>> {
        let em = self.emissions(feats)?;
        Ok(crf::viterbi(&em, &self.transitions)?.0)
    }
}

/// Zeroes whole word vectors with probability `p`.
pub(crate) fn word_dropout(feats: &Tensor<f32>, p: f64, seed: u64) -> Tensor<f32> {
    let mut out = feats.clone();
    if p <= 0.0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..out.rows() {
        if rng.gen::<f64>() < p {
            out.row_mut(t).fill(0.0);
        }
    }
    out
}

/// BiLSTM-CRF head over a frozen stacked embedder.
#[derive(Clone, Debug, PartialEq)]
pub struct CrfTagger {
    pub embedder: StackedEmbedder,
    pub tags: TagSet,
    pub config: TaggerConfig,
    pub weights: TaggerWeights<f32>,
}

impl CrfTagger {
    pub fn new(
        embedder: StackedEmbedder,
        tags: TagSet,
        config: TaggerConfig,
        seed: u64,
    ) -> Result<Self> {
        if config.hidden == 0 {
            return Err(Error::Input("tagger hidden size must be positive".into()));
        }
        let weights = TaggerWeights::new(embedder.dim(), config.hidden, tags.len(), seed);
        Ok(CrfTagger {
            embedder,
            tags,
            config,
            weights,
        })
    }

    pub fn from_parts(
        embedder: StackedEmbedder,
        tags: TagSet,
        config: TaggerConfig,
        weights: TaggerWeights<f32>,
    ) -> Result<Self> {
        let ok = weights.input_size() == embedder.dim()
            && weights.num_tags() == tags.len()
            && weights.fwd.hidden_size() == config.hidden
            && weights.bwd.input_size() == embedder.dim()
            && weights.bwd.hidden_size() == config.hidden
            && weights.proj.input_size() == 2 * config.hidden
            && weights.transitions.shape() == [tags.len() + 2, tags.len() + 2];
        if !ok {
            return Err(Error::shape(
                "tagger weights do not match embedder, tag set and config",
            ));
        }
        Ok(CrfTagger {
            embedder,
            tags,
            config,
            weights,
        })
    }

    pub fn predict(&self, s: &Sentence) -> Result<Vec<String>> {
        let feats = self.embedder.embed(s)?;
        let ids = self.weights.decode(&feats)?;
        Ok(ids
            .into_iter()
            .map(|i| self.tags.name(i).to_owned())
            .collect())
    }
}
