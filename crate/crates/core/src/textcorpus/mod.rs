//! Corpus ingestion: character dictionaries, splits and dataset readers.

mod conllu;
mod dict;
mod labeled;
mod split;
mod vecfile;

use std::path::Path;

pub use conllu::{parse_conllu, read_conllu, write_conllu, DEFAULT_FORM_COL, DEFAULT_TAG_COL};
pub use dict::{CharDictionary, BOUNDARY_ID, DEFAULT_MAX_CHARS, UNK_ID};
pub use labeled::{parse_labeled, read_labeled, LABEL_PREFIX};
pub use split::{split_corpus, CorpusSplit, PAPER_RATIOS};
pub use vecfile::{load_vec_table, parse_vec_table, StaticWordTable};

use crate::{Error, Result};

/// A whitespace-free, non-empty token sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<String>,
}

impl Sentence {
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Input("empty sentence".into()));
        }
        if let Some(t) = tokens
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(Error::Input(format!("invalid token {t:?}")));
        }
        Ok(Sentence { tokens })
    }

    /// Whitespace tokenisation.
    pub fn from_text(text: &str) -> Result<Self> {
        Self::new(text.split_whitespace().map(str::to_owned).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens joined by single spaces.
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedSentence {
    pub sentence: Sentence,
    pub tags: Vec<String>,
}

impl TaggedSentence {
    pub fn new(tokens: Vec<String>, tags: Vec<String>) -> Result<Self> {
        if tokens.len() != tags.len() {
            return Err(Error::Input(format!(
                "{} tokens but {} tags",
                tokens.len(),
                tags.len()
            )));
        }
        Ok(TaggedSentence {
            sentence: Sentence::new(tokens)?,
            tags,
        })
    }

    pub fn tokens(&self) -> &[String] {
        self.sentence.tokens()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledText {
    pub label: String,
    pub text: Sentence,
}

/// Reads a UTF-8 file as lines, dropping a trailing `\r`.
pub fn read_lines(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(raw
        .lines()
        .map(|l| l.trim_end_matches('\r').to_owned())
        .collect())
}
