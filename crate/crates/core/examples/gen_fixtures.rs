//! Regenerates the bundled test fixtures.
//!
//! ```text
//! cargo run -p csembed --example gen_fixtures -- crates/core/fixtures
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Distinct first characters, so each word is identified by its first
/// character and nothing else in a line is uncertain.
const LM_WORDS: [&str; 6] = ["कमल", "नदी", "घर", "पानी", "सूरज", "बादल"];
const LM_LINES: usize = 200;
const LM_WORDS_PER_LINE: usize = 5;

const TAG_LEXICON: &[(&str, &[&str])] = &[
    ("PRP", &["मैं", "वह", "हम", "तुम"]),
    ("NN", &["लड़का", "किताब", "घर", "पानी", "स्कूल", "खाना"]),
    ("NNP", &["राम", "सीता", "दिल्ली", "गंगा"]),
    ("PSP", &["में", "से", "को", "पर"]),
    ("JJ", &["अच्छा", "बड़ा", "नया", "लाल"]),
    ("VM", &["पढ़", "जा", "खा", "देख"]),
    ("VAUX", &["है", "था", "रहा"]),
    ("SYM", &["।"]),
];

const TEMPLATES: &[&[&str]] = &[
    &["PRP", "NN", "PSP", "VM", "VAUX", "SYM"],
    &["NNP", "JJ", "NN", "VM", "VAUX", "SYM"],
    &["PRP", "NNP", "PSP", "NN", "VM", "VAUX", "SYM"],
    &["NNP", "NN", "PSP", "JJ", "NN", "VM", "VAUX", "SYM"],
    &["JJ", "NN", "PSP", "PRP", "VM", "SYM"],
];

const POSITIVE: [&str; 6] = ["शानदार", "बेहतरीन", "मज़ेदार", "सुंदर", "प्यारी", "अद्भुत"];
const NEGATIVE: [&str; 6] = ["बेकार", "उबाऊ", "घटिया", "खराब", "धीमी", "कमजोर"];
const NEUTRAL: [&str; 4] = ["फिल्म", "कहानी", "अभिनय", "संगीत"];

fn lexicon(tag: &str) -> &'static [&'static str] {
    TAG_LEXICON
        .iter()
        .find(|(t, _)| *t == tag)
        .expect("tag in lexicon")
        .1
}

fn conllu(rng: &mut ChaCha8Rng, n: usize) -> String {
    let mut out = String::new();
    for s in 0..n {
        let template = TEMPLATES[s % TEMPLATES.len()];
        let words: Vec<&str> = template
            .iter()
            .map(|t| *lexicon(t).choose(rng).unwrap())
            .collect();
        writeln!(out, "# text = {}", words.join(" ")).unwrap();
        for (i, (w, t)) in words.iter().zip(template.iter()).enumerate() {
            writeln!(out, "{}\t{w}\t{w}\t_\t{t}\t_\t_\t_\t_\t_", i + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

fn labeled(rng: &mut ChaCha8Rng, n: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        let (label, pool) = if i % 2 == 0 {
            ("pos", &POSITIVE)
        } else {
            ("neg", &NEGATIVE)
        };
        let len = rng.gen_range(3..=6);
        let words: Vec<&str> = (0..len)
            .map(|j| {
                if j % 2 == 0 {
                    *pool.choose(rng).unwrap()
                } else {
                    *NEUTRAL.choose(rng).unwrap()
                }
            })
            .collect();
        writeln!(out, "__label__{label} {}", words.join(" ")).unwrap();
    }
    out
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap_or_else(|e| panic!("writing {name}: {e}"));
}

fn main() {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/core/fixtures".into()),
    );
    fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);

    let mut lm = String::new();
    for _ in 0..LM_LINES {
        let words: Vec<&str> = (0..LM_WORDS_PER_LINE)
            .map(|_| *LM_WORDS.choose(&mut rng).unwrap())
            .collect();
        writeln!(lm, "{}", words.join(" ")).unwrap();
    }
    write(&dir, "lm_corpus.txt", &lm);
    write(&dir, "contexts.txt", "कमल नदी घर\nबादल सूरज घर\n");
    write(&dir, "ppl_oracle.txt", "aaaa\naaaaaa\naa\n");

    write(&dir, "treebank_train.conllu", &conllu(&mut rng, 50));
    write(&dir, "treebank_test.conllu", &conllu(&mut rng, 10));

    write(&dir, "reviews_train.txt", &labeled(&mut rng, 40));
    write(&dir, "reviews_test.txt", &labeled(&mut rng, 10));

    let mut words: Vec<&str> = TAG_LEXICON
        .iter()
        .flat_map(|(_, ws)| ws.iter().copied())
        .collect();
    words.extend(POSITIVE.iter().chain(&NEGATIVE).chain(&NEUTRAL));
    words.sort_unstable();
    words.dedup();
    let dim = 8;
    let mut vec = format!("{} {dim}\n", words.len());
    for w in &words {
        let v: Vec<String> = (0..dim)
            .map(|_| format!("{:.4}", rng.gen_range(-1.0..1.0f32)))
            .collect();
        writeln!(vec, "{w} {}", v.join(" ")).unwrap();
    }
    write(&dir, "static.vec", &vec);
}
