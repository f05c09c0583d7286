use std::path::Path;

use super::{LabeledText, Sentence};
use crate::{Error, Result};

pub const LABEL_PREFIX: &str = "__label__";

/// Reads `__label__<name> <text>` lines. Blank lines are ignored.
pub fn read_labeled(path: impl AsRef<Path>) -> Result<Vec<LabeledText>> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labeled(&raw, path)
}

pub fn parse_labeled(text: &str, source: impl AsRef<Path>) -> Result<Vec<LabeledText>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: &str| Error::parse(&source, i + 1, msg);
        let rest = line
            .strip_prefix(LABEL_PREFIX)
            .ok_or_else(|| err("missing __label__ prefix"))?;
        let (label, body) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        if label.is_empty() {
            return Err(err("empty label"));
        }
        let text = Sentence::from_text(body).map_err(|_| err("no text after label"))?;
        out.push(LabeledText {
            label: label.to_owned(),
            text,
        });
    }
    Ok(out)
}
