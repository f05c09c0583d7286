mod common;

use common::{fixture, small_lm};
use csembed::charlm::{perplexity, CharLm, Direction};
use csembed::classifier::{evaluate_classifier, train_classifier, ClassifierConfig, GruClassifier};
use csembed::embed::{ContextualEmbedder, EmbedderPart, StackedEmbedder};
use csembed::persist::{self, from_bytes, load, save, to_bytes, ModelKind};
use csembed::tagger::{evaluate_tagger, train_tagger, CrfTagger, TaggerConfig};
use csembed::textcorpus::{
    load_vec_table, read_conllu, read_labeled, read_lines, CharDictionary, StaticWordTable,
    DEFAULT_FORM_COL, DEFAULT_TAG_COL,
};
use csembed::{Error, FitConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quick_tagger() -> CrfTagger {
    let train = read_conllu(
        fixture("treebank_train.conllu"),
        DEFAULT_FORM_COL,
        DEFAULT_TAG_COL,
    )
    .unwrap();
    let ctx = ContextualEmbedder::new(small_lm(Direction::Forward), None).unwrap();
    let table = load_vec_table(fixture("static.vec")).unwrap();
    let emb = StackedEmbedder::new(vec![
        EmbedderPart::Contextual(ctx),
        EmbedderPart::Static(table),
    ])
    .unwrap();
    let cfg = TaggerConfig {
        hidden: 8,
        fit: FitConfig {
            epochs: 2,
            ..TaggerConfig::default().fit
        },
        ..Default::default()
    };
    train_tagger(emb, &train, &[], cfg, 3).unwrap().0
}

#[test]
fn lm_round_trip_reproduces_perplexity_bit_exactly() {
    let lm = small_lm(Direction::Backward);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lm.csem");
    save(&lm, &path).unwrap();
    let back: CharLm = load(&path).unwrap();
    assert_eq!(back, lm);
    let text = read_lines(fixture("contexts.txt")).unwrap();
    let a = perplexity(&lm, &text).unwrap();
    let b = perplexity(&back, &text).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
    assert_eq!(persist::peek_kind(&path).unwrap(), ModelKind::CharLm);
}

#[test]
fn tagger_round_trip_reproduces_report() {
    let tagger = quick_tagger();
    let test = read_conllu(
        fixture("treebank_test.conllu"),
        DEFAULT_FORM_COL,
        DEFAULT_TAG_COL,
    )
    .unwrap();
    let back: CrfTagger = from_bytes(&to_bytes(&tagger)).unwrap();
    assert_eq!(back, tagger);
    let a = evaluate_tagger(&tagger, &test).unwrap();
    let b = evaluate_tagger(&back, &test).unwrap();
    assert_eq!(a.micro_f1.to_bits(), b.micro_f1.to_bits());
    assert_eq!(a, b);
}

#[test]
fn classifier_round_trip_reproduces_accuracy() {
    let train = read_labeled(fixture("reviews_train.txt")).unwrap();
    let table = load_vec_table(fixture("static.vec")).unwrap();
    let emb = StackedEmbedder::new(vec![EmbedderPart::Static(table)]).unwrap();
    let cfg = ClassifierConfig {
        hidden: 8,
        fit: FitConfig {
            epochs: 2,
            ..ClassifierConfig::default().fit
        },
    };
    let (model, _) = train_classifier(emb, &train, &[], cfg, 3).unwrap();
    let back: GruClassifier = from_bytes(&to_bytes(&model)).unwrap();
    assert_eq!(back, model);
    assert_eq!(
        evaluate_classifier(&model, &train).unwrap(),
        evaluate_classifier(&back, &train).unwrap()
    );
}

#[test]
fn saves_are_byte_identical() {
    let lm = small_lm(Direction::Forward);
    assert_eq!(to_bytes(&lm), to_bytes(&lm.clone()));
    let table = load_vec_table(fixture("static.vec")).unwrap();
    let back: StaticWordTable = from_bytes(&to_bytes(&table)).unwrap();
    assert_eq!(back, table);
}

#[test]
fn random_single_byte_corruptions_are_detected() {
    let bytes = to_bytes(&quick_tagger());
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let mut bad = bytes.clone();
        let i = rng.gen_range(0..bad.len());
        bad[i] ^= rng.gen_range(1..=255u8);
        let err = from_bytes::<CrfTagger>(&bad).unwrap_err();
        assert!(
            matches!(err, Error::Corruption(_) | Error::Format(_)),
            "byte {i}: {err}"
        );
    }
}

#[test]
fn every_truncation_is_an_error() {
    let d = CharDictionary::build(["कमल नदी"], 100).unwrap();
    let bytes = to_bytes(&d);
    for n in 0..bytes.len() {
        assert!(
            from_bytes::<CharDictionary>(&bytes[..n]).is_err(),
            "prefix {n}"
        );
    }
}

#[test]
fn loading_the_wrong_kind() {
    let d = CharDictionary::build(["कमल"], 100).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dict.csem");
    save(&d, &path).unwrap();
    assert!(matches!(load::<CharLm>(&path), Err(Error::Kind { .. })));
    assert!(matches!(
        load::<CharDictionary>(dir.path().join("missing")),
        Err(Error::Io { .. })
    ));
}
