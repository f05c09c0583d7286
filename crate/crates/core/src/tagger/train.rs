use super::model::{word_dropout, CrfTagger, TagSet, TaggerConfig, TaggerWeights};
use super::report::TagReport;
use crate::embed::StackedEmbedder;
use crate::fit::{example_seed, fit, DevScore, EpochLog};
use crate::numcore::Tensor;
use crate::textcorpus::TaggedSentence;
use crate::{par, Error, Result};

struct Example {
    feats: Tensor<f32>,
    gold: Vec<usize>,
}

fn encode_all(
    embedder: &StackedEmbedder,
    tags: &TagSet,
    data: &[TaggedSentence],
) -> Result<Vec<Example>> {
    let golds = data
        .iter()
        .enumerate()
        .map(|(k, s)| tags.encode(s, k))
        .collect::<Result<Vec<_>>>()?;
    let sents: Vec<_> = data.iter().map(|s| &s.sentence).collect();
    let feats = embedder.embed_all(&sents)?;
    Ok(feats
        .into_iter()
        .zip(golds)
        .map(|(feats, gold)| Example { feats, gold })
        .collect())
}

fn micro_f1(tagger: &TaggerWeights<f32>, data: &[Example]) -> Result<f64> {
    let hits = par::map(data, |_, ex| -> Result<(usize, usize)> {
        let pred = tagger.decode(&ex.feats)?;
        Ok((
            pred.iter().zip(&ex.gold).filter(|(p, g)| p == g).count(),
            ex.gold.len(),
        ))
    });
    let (mut ok, mut total) = (0, 0);
    for h in hits {
        let (a, b) = h?;
        ok += a;
        total += b;
    }
    Ok(if total == 0 {
        0.0
    } else {
        ok as f64 / total as f64
    })
}

/// Trains a BiLSTM-CRF over a frozen embedder. The tag set is taken from
/// the training data; dev tags outside it are a data error. Weights from
/// the epoch with the best dev micro-F1 are kept; when `dev` is empty the
/// lowest training loss decides instead.
pub fn train_tagger(
    embedder: StackedEmbedder,
    train: &[TaggedSentence],
    dev: &[TaggedSentence],
    config: TaggerConfig,
    seed: u64,
) -> Result<(CrfTagger, Vec<EpochLog>)> {
    if train.is_empty() {
        return Err(Error::Input("no training sentences".into()));
    }
    if !(0.0..1.0).contains(&config.word_dropout) {
        return Err(Error::Input(format!(
            "word dropout must be in [0, 1), got {}",
            config.word_dropout
        )));
    }
    let tags = TagSet::from_sentences(train)?;
    let tagger = CrfTagger::new(embedder, tags, config, seed)?;
    let train_ex = encode_all(&tagger.embedder, &tagger.tags, train)?;
    let dev_ex = encode_all(&tagger.embedder, &tagger.tags, dev)?;
    let p = tagger.config.word_dropout;
    let mut dev_f1 = |w: &TaggerWeights<f32>| micro_f1(w, &dev_ex);
    let dev_score: Option<DevScore<TaggerWeights<f32>>> = if dev_ex.is_empty() {
        None
    } else {
        Some(&mut dev_f1)
    };
    let (weights, log) = fit(
        tagger.weights.clone(),
        &train_ex,
        &tagger.config.fit,
        seed,
        |w, i, epoch, ex, g| {
            let feats = word_dropout(&ex.feats, p, example_seed(seed, epoch, i));
            w.loss_and_grad(&feats, &ex.gold, g)
        },
        dev_score,
    )?;
    for e in &log {
        log::info!(
            "tagger epoch {} loss {:.4} dev-F1 {:.4} lr {}",
            e.epoch + 1,
            e.train_loss,
            e.dev_score,
            e.lr
        );
    }
    Ok((CrfTagger { weights, ..tagger }, log))
}

/// Decodes every sentence and scores it against the gold tags.
pub fn evaluate_tagger(tagger: &CrfTagger, test: &[TaggedSentence]) -> Result<TagReport> {
    let preds = par::map(test, |_, s| tagger.predict(&s.sentence))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let gold: Vec<Vec<String>> = test.iter().map(|s| s.tags.clone()).collect();
    TagReport::compute(tagger.tags.names(), &gold, &preds)
}
