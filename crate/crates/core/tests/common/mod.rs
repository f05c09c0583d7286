#![allow(dead_code)]

use csembed::charlm::{train_lm, CharLm, CharLmConfig, Direction};
use csembed::textcorpus::{read_lines, split_corpus, CharDictionary, PAPER_RATIOS};

pub fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// A small LM trained briefly on the synthetic corpus.
pub fn small_lm(direction: Direction) -> CharLm {
    let lines = read_lines(fixture("lm_corpus.txt")).unwrap();
    let split = split_corpus(lines, PAPER_RATIOS, 42).unwrap();
    let dict = CharDictionary::build(&split.train, 2000).unwrap();
    let cfg = CharLmConfig {
        char_embed_dim: 8,
        hidden: 16,
        seq_len: 30,
        batch: 8,
        shard_lines: 40,
        epochs: 2,
        direction,
        ..Default::default()
    };
    train_lm(&cfg, dict, &split.train, &split.valid, 3)
        .unwrap()
        .0
}
