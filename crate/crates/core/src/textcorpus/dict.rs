use std::collections::HashMap;

use crate::{Error, Result};

/// Id for characters outside the dictionary.
pub const UNK_ID: u32 = 0;
/// Id of the sentence-boundary symbol inserted between lines.
pub const BOUNDARY_ID: u32 = 1;
pub const DEFAULT_MAX_CHARS: usize = 2000;

/// Bijection between Unicode scalar values and ids `2..`.
///
/// Ids 0 and 1 are reserved for UNK and the line boundary and never map to a
/// corpus character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharDictionary {
    chars: Vec<char>,
    ids: HashMap<char, u32>,
}

impl CharDictionary {
    /// Keeps the `max_chars` most frequent scalars; ties by first occurrence.
    pub fn build<I, S>(lines: I, max_chars: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut counts: HashMap<char, (usize, usize)> = HashMap::new();
        let mut seen = 0usize;
        for line in lines {
            for c in line.as_ref().chars() {
                let e = counts.entry(c).or_insert((0, seen));
                e.0 += 1;
                seen += 1;
            }
        }
        if counts.is_empty() {
            return Err(Error::Input(
                "cannot build a character dictionary from an empty corpus".into(),
            ));
        }
        let mut ranked: Vec<(char, usize, usize)> = counts
            .into_iter()
            .map(|(c, (n, first))| (c, n, first))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
        ranked.truncate(max_chars);
        Self::from_chars(ranked.into_iter().map(|(c, _, _)| c).collect())
    }

    /// Assigns ids `2, 3, …` in the given order.
    pub fn from_chars(chars: Vec<char>) -> Result<Self> {
        let mut ids = HashMap::with_capacity(chars.len());
        for (i, &c) in chars.iter().enumerate() {
            if ids.insert(c, i as u32 + 2).is_some() {
                return Err(Error::Data(format!(
                    "duplicate character {c:?} in dictionary"
                )));
            }
        }
        Ok(CharDictionary { chars, ids })
    }

    /// Vocabulary size including the two reserved ids.
    pub fn len(&self) -> usize {
        self.chars.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Retained characters in id order (id = index + 2).
    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn id(&self, c: char) -> u32 {
        self.ids.get(&c).copied().unwrap_or(UNK_ID)
    }

    pub fn char_of(&self, id: u32) -> Option<char> {
        (id as usize)
            .checked_sub(2)
            .and_then(|i| self.chars.get(i))
            .copied()
    }

    pub fn encode(&self, text: &str) -> Vec<u32> {
        text.chars().map(|c| self.id(c)).collect()
    }
}
