mod common;

use common::{fixture, small_lm};
use csembed::charlm::Direction;
use csembed::classifier::{evaluate_classifier, train_classifier, ClassifierConfig};
use csembed::embed::{ContextualEmbedder, EmbedderPart, StackedEmbedder};
use csembed::tagger::{evaluate_tagger, train_tagger, TaggerConfig};
use csembed::textcorpus::{
    load_vec_table, read_conllu, read_labeled, DEFAULT_FORM_COL, DEFAULT_TAG_COL,
};

fn stacked() -> StackedEmbedder {
    let ctx = ContextualEmbedder::new(
        small_lm(Direction::Forward),
        Some(small_lm(Direction::Backward)),
    )
    .unwrap();
    let table = load_vec_table(fixture("static.vec")).unwrap();
    StackedEmbedder::new(vec![
        EmbedderPart::Contextual(ctx),
        EmbedderPart::Static(table),
    ])
    .unwrap()
}

#[test]
fn tagger_overfits_toy_treebank() {
    let train = read_conllu(
        fixture("treebank_train.conllu"),
        DEFAULT_FORM_COL,
        DEFAULT_TAG_COL,
    )
    .unwrap();
    assert_eq!(train.len(), 50);
    let (tagger, log) = train_tagger(stacked(), &train, &[], TaggerConfig::default(), 42).unwrap();
    let report = evaluate_tagger(&tagger, &train).unwrap();
    assert!(report.micro_f1 >= 0.99, "{report}\n{log:?}");
    assert_eq!(
        report.micro_f1,
        report.correct as f64 / report.tokens as f64
    );
}

#[test]
fn tagger_training_is_deterministic() {
    let train = read_conllu(
        fixture("treebank_train.conllu"),
        DEFAULT_FORM_COL,
        DEFAULT_TAG_COL,
    )
    .unwrap();
    let table = load_vec_table(fixture("static.vec")).unwrap();
    let emb = StackedEmbedder::new(vec![EmbedderPart::Static(table)]).unwrap();
    let cfg = TaggerConfig {
        hidden: 8,
        fit: csembed::FitConfig {
            epochs: 3,
            ..TaggerConfig::default().fit
        },
        ..Default::default()
    };
    let (a, la) = train_tagger(emb.clone(), &train[..20], &train[20..30], cfg.clone(), 7).unwrap();
    let (b, lb) = train_tagger(emb, &train[..20], &train[20..30], cfg, 7).unwrap();
    assert_eq!(la, lb);
    assert_eq!(a.weights, b.weights);
}

#[test]
fn unknown_dev_tag_is_a_data_error() {
    let mut train = read_conllu(
        fixture("treebank_train.conllu"),
        DEFAULT_FORM_COL,
        DEFAULT_TAG_COL,
    )
    .unwrap();
    let mut dev = train.split_off(45);
    dev[0].tags[0] = "XYZ".into();
    let table = load_vec_table(fixture("static.vec")).unwrap();
    let emb = StackedEmbedder::new(vec![EmbedderPart::Static(table)]).unwrap();
    let err = train_tagger(emb, &train, &dev, TaggerConfig::default(), 1).unwrap_err();
    assert!(
        matches!(err, csembed::Error::Data(ref m) if m.contains("XYZ")),
        "{err}"
    );
}

#[test]
fn classifier_separates_disjoint_vocabularies() {
    let train = read_labeled(fixture("reviews_train.txt")).unwrap();
    let test = read_labeled(fixture("reviews_test.txt")).unwrap();
    let table = load_vec_table(fixture("static.vec")).unwrap();
    let emb = StackedEmbedder::new(vec![EmbedderPart::Static(table)]).unwrap();
    let (model, log) = train_classifier(emb, &train, &[], ClassifierConfig::default(), 42).unwrap();
    assert!(log.len() <= 50);
    let report = evaluate_classifier(&model, &train).unwrap();
    assert_eq!(report.accuracy, 1.0, "{report}");
    let held_out = evaluate_classifier(&model, &test).unwrap();
    let trace: usize = (0..2).map(|i| held_out.confusion[i][i]).sum();
    assert_eq!(held_out.accuracy, trace as f64 / held_out.total() as f64);
    assert_eq!(held_out.total(), test.len());
}

#[test]
fn classifier_over_stacked_embeddings() {
    let train = read_labeled(fixture("reviews_train.txt")).unwrap();
    let cfg = ClassifierConfig {
        hidden: 16,
        ..Default::default()
    };
    let (model, _) = train_classifier(stacked(), &train, &[], cfg, 42).unwrap();
    assert_eq!(model.embedder.dim(), 16 + 16 + 8);
    assert_eq!(evaluate_classifier(&model, &train).unwrap().accuracy, 1.0);
}
