use std::path::Path;

use super::TaggedSentence;
use crate::{Error, Result};

pub const DEFAULT_FORM_COL: usize = 1;
/// XPOS; the Hindi treebank's fine-grained tag set lives here.
pub const DEFAULT_TAG_COL: usize = 4;

pub fn read_conllu(
    path: impl AsRef<Path>,
    form_col: usize,
    tag_col: usize,
) -> Result<Vec<TaggedSentence>> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(&raw, path, form_col, tag_col)
}

/// Parses CoNLL-U text. `source` only labels error messages.
///
/// Comment lines and multiword/empty-node lines (ids with `-` or `.`) are
/// skipped; blank lines end a sentence.
pub fn parse_conllu(
    text: &str,
    source: impl AsRef<Path>,
    form_col: usize,
    tag_col: usize,
) -> Result<Vec<TaggedSentence>> {
    let need = form_col.max(tag_col) + 1;
    let mut out = Vec::new();
    let (mut forms, mut tags) = (Vec::new(), Vec::new());
    let mut flush = |forms: &mut Vec<String>, tags: &mut Vec<String>, line: usize| -> Result<()> {
        if !forms.is_empty() {
            let s = TaggedSentence::new(std::mem::take(forms), std::mem::take(tags))
                .map_err(|e| Error::parse(&source, line, e.to_string()))?;
            out.push(s);
        }
        Ok(())
    };
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last = lineno;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut forms, &mut tags, lineno)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        if cols.len() < need {
            return Err(Error::parse(
                &source,
                lineno,
                format!(
                    "expected at least {need} tab-separated columns, found {}",
                    cols.len()
                ),
            ));
        }
        forms.push(cols[form_col].to_owned());
        tags.push(cols[tag_col].to_owned());
    }
    flush(&mut forms, &mut tags, last)?;
    Ok(out)
}

/// Minimal CoNLL-U with forms and tags in the given columns; other columns `_`.
pub fn write_conllu(sentences: &[TaggedSentence], form_col: usize, tag_col: usize) -> String {
    let width = form_col.max(tag_col).max(9) + 1;
    let mut out = String::new();
    for s in sentences {
        for (i, (form, tag)) in s.tokens().iter().zip(&s.tags).enumerate() {
            let mut cols = vec!["_".to_owned(); width];
            cols[0] = (i + 1).to_string();
            cols[form_col] = form.clone();
            cols[tag_col] = tag.clone();
            out.push_str(&cols.join("\t"));
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
