//! Effective run settings: defaults, then a `key = value` config file, then
//! command-line flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ArgMatches;
use csembed::charlm::{CharLmConfig, Direction};
use csembed::classifier::ClassifierConfig;
use csembed::tagger::TaggerConfig;
use csembed::textcorpus::{DEFAULT_FORM_COL, DEFAULT_MAX_CHARS, DEFAULT_TAG_COL};
use csembed::FitConfig;

use crate::CliError;

/// One configurable key: also a `--long` flag of the same name.
pub struct Key {
    pub name: &'static str,
    pub help: &'static str,
    pub required: bool,
}

const fn key(name: &'static str, help: &'static str) -> Key {
    Key {
        name,
        help,
        required: false,
    }
}

const fn req(name: &'static str, help: &'static str) -> Key {
    Key {
        name,
        help,
        required: true,
    }
}

const SEED: Key = key("seed", "random seed [default: 42]");
const PRESET: Key = key(
    "preset",
    "hyperparameter preset: desk or paper [default: desk]",
);
const MAX_CHARS: Key = key("max-chars", "dictionary size cap");
const FORM_COL: Key = key(
    "form-col",
    "zero-based CoNLL-U column holding the word form",
);
const TAG_COL: Key = key(
    "tag-col",
    "zero-based CoNLL-U column holding the tag (4 = XPOS, 3 = UPOS)",
);
const EMBEDDINGS: Key = key(
    "embeddings",
    "stack spec, e.g. \"contextual:fwd.csem,bwd.csem static:vecs.vec\"",
);

const FIT_KEYS: [Key; 6] = [
    key("lr", "initial learning rate"),
    key("epochs", "training epochs"),
    key("batch", "mini-batch size"),
    key("anneal-factor", "learning rate divisor on a plateau"),
    key("patience", "epochs without improvement before annealing"),
    key("clip", "global gradient-norm clip"),
];

pub fn keys(command: &str) -> Vec<Key> {
    let mut k = vec![SEED, PRESET];
    match command {
        "build-dict" => k.extend([
            req("corpus", "UTF-8 text, one line per sentence"),
            req("out", "dictionary file"),
            MAX_CHARS,
        ]),
        "split" => k.extend([
            req("corpus", "text to split 80/10/10"),
            req("out-dir", "directory for train/valid/test.txt"),
        ]),
        "train-lm" => k.extend([
            req(
                "corpus",
                "training text; split 80/10/10 when --valid is absent",
            ),
            key("valid", "validation text"),
            key("dict", "prebuilt dictionary file"),
            req("out", "model file"),
            key("log", "TSV checkpoint log, appended"),
            MAX_CHARS,
            key("embed-dim", "character embedding size"),
            key("hidden", "LSTM hidden size"),
            key("layers", "LSTM layers"),
            key("seq-len", "truncated BPTT length"),
            key("batch", "parallel streams per batch"),
            key("lr", "initial learning rate"),
            key("anneal-factor", "learning rate divisor on a plateau"),
            key(
                "patience",
                "checkpoints without improvement before annealing",
            ),
            key("epochs", "passes over the training text"),
            key("direction", "forward or backward"),
            key("clip", "global gradient-norm clip"),
            key("shard-lines", "lines per shard; one checkpoint per shard"),
        ]),
        "eval-lm" => k.extend([
            req("model", "language model file"),
            req("text", "text to score"),
        ]),
        "embed" => k.extend([
            EMBEDDINGS,
            req("text", "one sentence per line"),
            req("out", "output file: token<TAB>vector"),
        ]),
        "train-tagger" => {
            k.extend([
                req("train", "CoNLL-U training data"),
                key("dev", "CoNLL-U dev data"),
                req("out", "model file"),
                EMBEDDINGS,
                FORM_COL,
                TAG_COL,
                key("hidden", "BiLSTM hidden size per direction"),
                key("word-dropout", "probability of zeroing a word vector"),
            ]);
            k.extend(FIT_KEYS);
        }
        "eval-tagger" => k.extend([
            req("model", "tagger file"),
            req("test", "CoNLL-U test data"),
            key("report", "write the per-tag table here"),
            FORM_COL,
            TAG_COL,
        ]),
        "train-classifier" => {
            k.extend([
                req("train", "__label__ training data"),
                key("dev", "__label__ dev data"),
                req("out", "model file"),
                EMBEDDINGS,
                key("hidden", "GRU hidden size"),
            ]);
            k.extend(FIT_KEYS);
        }
        "eval-classifier" => k.extend([
            req("model", "classifier file"),
            req("test", "__label__ test data"),
            key("report", "write the report here"),
        ]),
        _ => {}
    }
    k
}

fn fit_defaults(m: &mut BTreeMap<String, String>, f: &FitConfig) {
    m.insert("lr".into(), f.lr.to_string());
    m.insert("epochs".into(), f.epochs.to_string());
    m.insert("batch".into(), f.batch.to_string());
    m.insert("anneal-factor".into(), f.anneal_factor.to_string());
    m.insert("patience".into(), f.patience.to_string());
    m.insert("clip".into(), f.clip.to_string());
}

fn defaults(command: &str, paper: bool) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("seed".into(), "42".into());
    m.insert("preset".into(), if paper { "paper" } else { "desk" }.into());
    match command {
        "build-dict" | "train-lm" => {
            m.insert("max-chars".into(), DEFAULT_MAX_CHARS.to_string());
        }
        _ => {}
    }
    match command {
        "train-lm" => {
            let c = if paper {
                CharLmConfig::paper()
            } else {
                CharLmConfig::default()
            };
            for (k, v) in [
                ("embed-dim", c.char_embed_dim.to_string()),
                ("hidden", c.hidden.to_string()),
                ("layers", c.layers.to_string()),
                ("seq-len", c.seq_len.to_string()),
                ("batch", c.batch.to_string()),
                ("lr", c.lr0.to_string()),
                ("anneal-factor", c.anneal_factor.to_string()),
                ("patience", c.patience.to_string()),
                ("epochs", c.epochs.to_string()),
                ("direction", c.direction.to_string()),
                ("clip", c.clip.to_string()),
                ("shard-lines", c.shard_lines.to_string()),
            ] {
                m.insert(k.into(), v);
            }
        }
        "train-tagger" => {
            let c = if paper {
                TaggerConfig::paper()
            } else {
                TaggerConfig::default()
            };
            m.insert("hidden".into(), c.hidden.to_string());
            m.insert("word-dropout".into(), c.word_dropout.to_string());
            fit_defaults(&mut m, &c.fit);
        }
        "train-classifier" => {
            let c = if paper {
                ClassifierConfig::paper()
            } else {
                ClassifierConfig::default()
            };
            m.insert("hidden".into(), c.hidden.to_string());
            fit_defaults(&mut m, &c.fit);
        }
        _ => {}
    }
    if matches!(command, "train-tagger" | "eval-tagger") {
        m.insert("form-col".into(), DEFAULT_FORM_COL.to_string());
        m.insert("tag-col".into(), DEFAULT_TAG_COL.to_string());
    }
    m
}

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_config_file(text: &str, path: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{path}:{}: expected key = value", i + 1)))?;
        out.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    Ok(out)
}

/// One stacked-embedder component, in stacking order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartSpec {
    Contextual {
        forward: PathBuf,
        backward: Option<PathBuf>,
    },
    Static(PathBuf),
}

pub fn parse_embeddings(spec: &str) -> Result<Vec<PartSpec>, CliError> {
    let mut parts = Vec::new();
    for item in spec.split_whitespace() {
        let (kind, value) = item.split_once(':').ok_or_else(|| {
            CliError::Usage(format!(
                "embedding part {item:?} must be contextual:PATH[,PATH] or static:PATH"
            ))
        })?;
        parts.push(match kind {
            "contextual" => contextual_spec(value)?,
            "static" => PartSpec::Static(value.into()),
            _ => return Err(CliError::Usage(format!("unknown embedding kind {kind:?}"))),
        });
    }
    Ok(parts)
}

fn contextual_spec(value: &str) -> Result<PartSpec, CliError> {
    let mut it = value.split(',');
    let forward = it
        .next()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| CliError::Usage("empty contextual model path".into()))?;
    let backward = it.next().map(PathBuf::from);
    if it.next().is_some() {
        return Err(CliError::Usage(format!(
            "contextual takes at most two models, got {value:?}"
        )));
    }
    Ok(PartSpec::Contextual {
        forward: forward.into(),
        backward,
    })
}

fn render_embeddings(parts: &[PartSpec]) -> String {
    parts
        .iter()
        .map(|p| match p {
            PartSpec::Contextual {
                forward,
                backward: Some(b),
            } => format!("contextual:{},{}", forward.display(), b.display()),
            PartSpec::Contextual {
                forward,
                backward: None,
            } => format!("contextual:{}", forward.display()),
            PartSpec::Static(p) => format!("static:{}", p.display()),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// `--contextual` / `--static` occurrences in command-line order.
fn embedding_flags(m: &ArgMatches) -> Result<Vec<PartSpec>, CliError> {
    let mut found: Vec<(usize, PartSpec)> = Vec::new();
    for name in ["contextual", "static"] {
        if let (Some(vals), Some(idx)) = (m.get_many::<String>(name), m.indices_of(name)) {
            for (v, i) in vals.zip(idx) {
                let part = if name == "contextual" {
                    contextual_spec(v)?
                } else {
                    PartSpec::Static(v.into())
                };
                found.push((i, part));
            }
        }
    }
    found.sort_by_key(|(i, _)| *i);
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

pub struct Settings {
    pub command: String,
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn resolve(command: &str, m: &ArgMatches) -> Result<Self, CliError> {
        let keys = keys(command);
        let mut file = Vec::new();
        if let Some(path) = m.get_one::<String>("config") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
            file = parse_config_file(&text, path)?;
            for (k, _) in &file {
                if !keys.iter().any(|key| key.name == k) {
                    return Err(CliError::Usage(format!(
                        "{path}: unknown key {k:?} for {command}"
                    )));
                }
            }
        }
        // the preset decides defaults, so look it up first
        let preset = m
            .get_one::<String>("preset")
            .cloned()
            .or_else(|| {
                file.iter()
                    .rev()
                    .find(|(k, _)| k == "preset")
                    .map(|(_, v)| v.clone())
            })
            .unwrap_or_else(|| "desk".into());
        let paper = match preset.as_str() {
            "desk" => false,
            "paper" => true,
            other => {
                return Err(CliError::Usage(format!(
                    "preset must be desk or paper, got {other:?}"
                )))
            }
        };
        let mut values = defaults(command, paper);
        values.extend(file);
        for k in &keys {
            if let Some(v) = m.get_one::<String>(k.name) {
                values.insert(k.name.into(), v.clone());
            }
        }
        if keys.iter().any(|k| k.name == "embeddings") {
            let flags = embedding_flags(m)?;
            if !flags.is_empty() {
                values.insert("embeddings".into(), render_embeddings(&flags));
            }
        }
        for k in &keys {
            if k.required && !values.contains_key(k.name) {
                return Err(CliError::Missing(format!("--{}", k.name)));
            }
        }
        Ok(Settings {
            command: command.into(),
            values,
        })
    }

    /// Effective settings as a config file that reproduces this run.
    pub fn render(&self) -> String {
        let mut s = format!("# effective config for {}\n", self.command);
        for (k, v) in &self.values {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn opt_str(&self, k: &str) -> Option<&str> {
        self.values.get(k).map(String::as_str)
    }

    pub fn str(&self, k: &str) -> &str {
        self.opt_str(k)
            .unwrap_or_else(|| panic!("setting {k} has no value"))
    }

    pub fn get<T: FromStr>(&self, k: &str) -> Result<T, CliError> {
        let v = self.str(k);
        v.parse()
            .map_err(|_| CliError::Usage(format!("invalid value {v:?} for {k}")))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.get("seed")
    }

    pub fn embeddings(&self) -> Result<Vec<PartSpec>, CliError> {
        let parts = parse_embeddings(self.opt_str("embeddings").unwrap_or(""))?;
        if parts.is_empty() {
            return Err(CliError::Missing("--contextual or --static".into()));
        }
        Ok(parts)
    }

    pub fn fit(&self) -> Result<FitConfig, CliError> {
        Ok(FitConfig {
            lr: self.get("lr")?,
            epochs: self.get("epochs")?,
            batch: self.get("batch")?,
            anneal_factor: self.get("anneal-factor")?,
            patience: self.get("patience")?,
            clip: self.get("clip")?,
        })
    }

    pub fn lm_config(&self) -> Result<CharLmConfig, CliError> {
        Ok(CharLmConfig {
            char_embed_dim: self.get("embed-dim")?,
            hidden: self.get("hidden")?,
            layers: self.get("layers")?,
            seq_len: self.get("seq-len")?,
            batch: self.get("batch")?,
            lr0: self.get("lr")?,
            anneal_factor: self.get("anneal-factor")?,
            patience: self.get("patience")?,
            epochs: self.get("epochs")?,
            direction: self.get::<Direction>("direction")?,
            clip: self.get("clip")?,
            shard_lines: self.get("shard-lines")?,
        })
    }
}
