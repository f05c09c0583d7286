use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::ClsReport;
use crate::embed::StackedEmbedder;
use crate::fit::{fit, DevScore, EpochLog, FitConfig};
use crate::labels::LabelIndex;
use crate::numcore::{
    gru_backward_impl, gru_cell, linear_backward, linear_forward, softmax_xent, GruParams, GruStep,
    LinearParams, ParamSet, Scalar, Tensor,
};
use crate::textcorpus::{LabeledText, Sentence};
use crate::{par, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierConfig {
    pub hidden: usize,
    pub fit: FitConfig,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            hidden: 64,
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

impl ClassifierConfig {
    pub fn paper() -> Self {
        let d = Self::default();
        ClassifierConfig {
            hidden: 256,
            fit: FitConfig {
                epochs: 200,
                batch: 32,
                ..d.fit
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierWeights<F = f32> {
    pub gru: GruParams<F>,
    /// `[C × H]`
    pub out: LinearParams<F>,
}

impl<F: Scalar> ParamSet<F> for ClassifierWeights<F> {
    fn tensors(&self) -> Vec<&Tensor<F>> {
        let mut v = self.gru.tensors();
        v.extend(self.out.tensors());
        v
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor<F>> {
        let mut v = self.gru.tensors_mut();
        v.extend(self.out.tensors_mut());
        v
    }
}

impl<F: Scalar> ClassifierWeights<F> {
    pub fn new(input: usize, hidden: usize, classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ClassifierWeights {
            gru: GruParams::new(input, hidden, &mut rng),
            out: LinearParams::new(hidden, classes, &mut rng),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.out.output_size()
    }

    fn run(&self, feats: &Tensor<F>) -> Result<Vec<GruStep<F>>> {
        if feats.rank() != 2 || feats.cols() != self.gru.input_size() {
            return Err(Error::shape(format!(
                "classifier expects n×{} features, got {:?}",
                self.gru.input_size(),
                feats.shape()
            )));
        }
        let mut h = vec![F::zero(); self.gru.hidden_size()];
        let mut steps = Vec::with_capacity(feats.rows());
        for t in 0..feats.rows() {
            let s = gru_cell(feats.row(t), &h, &self.gru)?;
            h.clone_from(&s.h);
            steps.push(s);
        }
        Ok(steps)
    }

    pub fn logits(&self, feats: &Tensor<F>) -> Result<Vec<F>> {
        let steps = self.run(feats)?;
        linear_forward(&self.out, &steps.last().expect("non-empty").h)
    }

    /// Cross-entropy against `gold`; gradients accumulate into `grads`.
    pub fn loss_and_grad(&self, feats: &Tensor<F>, gold: usize, grads: &mut Self) -> Result<F> {
        let steps = self.run(feats)?;
        let last = &steps.last().expect("non-empty").h;
        let logits = linear_forward(&self.out, last)?;
        let (loss, dlogits) = softmax_xent(&logits, gold)?;
        let mut dh = linear_backward(&self.out, last, &dlogits, &mut grads.out)?;
        for s in steps.iter().rev() {
            dh = gru_backward_impl(s, &dh, &self.gru, &mut grads.gru, false)?.1;
        }
        Ok(loss)
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax<F: Scalar>(xs: &[F]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// GRU head over a frozen stacked embedder.
#[derive(Clone, Debug, PartialEq)]
pub struct GruClassifier {
    pub embedder: StackedEmbedder,
    pub labels: LabelIndex,
    pub config: ClassifierConfig,
    pub weights: ClassifierWeights<f32>,
}

impl GruClassifier {
    pub fn new(
        embedder: StackedEmbedder,
        labels: LabelIndex,
        config: ClassifierConfig,
        seed: u64,
    ) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::Data(format!(
                "a classifier needs at least 2 labels, got {}",
                labels.len()
            )));
        }
        if config.hidden == 0 {
            return Err(Error::Input(
                "classifier hidden size must be positive".into(),
            ));
        }
        let weights = ClassifierWeights::new(embedder.dim(), config.hidden, labels.len(), seed);
        Ok(GruClassifier {
            embedder,
            labels,
            config,
            weights,
        })
    }

    pub fn from_parts(
        embedder: StackedEmbedder,
        labels: LabelIndex,
        config: ClassifierConfig,
        weights: ClassifierWeights<f32>,
    ) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::Data(format!(
                "a classifier needs at least 2 labels, got {}",
                labels.len()
            )));
        }
        let ok = weights.gru.input_size() == embedder.dim()
            && weights.gru.hidden_size() == config.hidden
            && weights.out.input_size() == config.hidden
            && weights.num_classes() == labels.len();
        if !ok {
            return Err(Error::shape(
                "classifier weights do not match embedder, labels and config",
            ));
        }
        Ok(GruClassifier {
            embedder,
            labels,
            config,
            weights,
        })
    }

    pub fn predict(&self, s: &Sentence) -> Result<usize> {
        Ok(argmax(&classify_forward(self, s)?))
    }

    pub fn predict_label(&self, s: &Sentence) -> Result<&str> {
        Ok(self.labels.name(self.predict(s)?))
    }
}

pub fn classify_forward(model: &GruClassifier, s: &Sentence) -> Result<Vec<f32>> {
    let feats = model.embedder.embed(s)?;
    model.weights.logits(&feats)
}

fn label_ids(labels: &LabelIndex, data: &[LabeledText]) -> Result<Vec<usize>> {
    data.iter()
        .enumerate()
        .map(|(k, x)| {
            labels.id(&x.label).ok_or_else(|| {
                Error::Data(format!(
                    "unknown label {:?} in example {k} ({:?})",
                    x.label,
                    x.text.text()
                ))
            })
        })
        .collect()
}

fn accuracy(w: &ClassifierWeights<f32>, data: &[(Tensor<f32>, usize)]) -> Result<f64> {
    let hits = par::map(data, |_, (feats, gold)| {
        w.logits(feats).map(|l| argmax(&l) == *gold)
    });
    let mut ok = 0usize;
    for h in hits {
        ok += h? as usize;
    }
    Ok(ok as f64 / data.len() as f64)
}

/// Trains a classifier over a frozen embedder. Labels are taken from the
/// training data in order of first appearance. Weights from the epoch with
/// the best dev accuracy are kept; when `dev` is empty the lowest training
/// loss decides instead.
pub fn train_classifier(
    embedder: StackedEmbedder,
    train: &[LabeledText],
    dev: &[LabeledText],
    config: ClassifierConfig,
    seed: u64,
) -> Result<(GruClassifier, Vec<EpochLog>)> {
    let mut labels = LabelIndex::new();
    for x in train {
        labels.insert(x.label.as_str());
    }
    let model = GruClassifier::new(embedder, labels, config, seed)?;
    let prep = |data: &[LabeledText]| -> Result<Vec<(Tensor<f32>, usize)>> {
        let ids = label_ids(&model.labels, data)?;
        let sents: Vec<_> = data.iter().map(|x| &x.text).collect();
        Ok(model
            .embedder
            .embed_all(&sents)?
            .into_iter()
            .zip(ids)
            .collect())
    };
    let train_ex = prep(train)?;
    let dev_ex = prep(dev)?;
    let mut dev_acc = |w: &ClassifierWeights<f32>| accuracy(w, &dev_ex);
    let dev_score: Option<DevScore<ClassifierWeights<f32>>> = if dev_ex.is_empty() {
        None
    } else {
        Some(&mut dev_acc)
    };
    let (weights, log) = fit(
        model.weights.clone(),
        &train_ex,
        &model.config.fit,
        seed,
        |w, _, _, (feats, gold), g| w.loss_and_grad(feats, *gold, g),
        dev_score,
    )?;
    for e in &log {
        log::info!(
            "classifier epoch {} loss {:.4} dev-acc {:.4} lr {}",
            e.epoch + 1,
            e.train_loss,
            e.dev_score,
            e.lr
        );
    }
    Ok((GruClassifier { weights, ..model }, log))
}

/// Accuracy and confusion matrix on `test`; gold labels unknown to the
/// model are a data error.
pub fn evaluate_classifier(model: &GruClassifier, test: &[LabeledText]) -> Result<ClsReport> {
    if test.is_empty() {
        return Err(Error::Input("empty test set".into()));
    }
    let gold = label_ids(&model.labels, test)?;
    let pred = par::map(test, |_, x| model.predict(&x.text))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    ClsReport::compute(model.labels.names().to_vec(), &gold, &pred)
}
