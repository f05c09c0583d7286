use std::collections::HashMap;
use std::path::Path;

use crate::numcore::Tensor;
use crate::{Error, Result};

/// Pre-trained static word vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticWordTable {
    dim: usize,
    words: Vec<String>,
    /// `[words × dim]`
    vectors: Vec<f32>,
    index: HashMap<String, usize>,
}

impl StaticWordTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input(
                "word vector dimension must be positive".into(),
            ));
        }
        Ok(StaticWordTable {
            dim,
            words: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
        })
    }

    /// Inserts or replaces a vector. Returns true if the word already existed.
    pub fn insert(&mut self, word: &str, vector: &[f32]) -> Result<bool> {
        if vector.len() != self.dim {
            return Err(Error::shape(format!(
                "vector for {word:?} has {} values, table dim is {}",
                vector.len(),
                self.dim
            )));
        }
        if let Some(&i) = self.index.get(word) {
            self.vectors[i * self.dim..(i + 1) * self.dim].copy_from_slice(vector);
            return Ok(true);
        }
        self.index.insert(word.to_owned(), self.words.len());
        self.words.push(word.to_owned());
        self.vectors.extend_from_slice(vector);
        Ok(false)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index
            .get(word)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    /// All vectors as a `[len × dim]` matrix, or `None` when empty.
    pub fn matrix(&self) -> Option<Tensor<f32>> {
        Tensor::matrix(self.len(), self.dim, self.vectors.clone()).ok()
    }
}

/// Loads the text `.vec` format: a `count dim` header, then `word v1 … v_dim`.
pub fn load_vec_table(path: impl AsRef<Path>) -> Result<StaticWordTable> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vec_table(&raw, path)
}

pub fn parse_vec_table(text: &str, source: impl AsRef<Path>) -> Result<StaticWordTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(&source, 1, "missing header"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let parse_usize = |s: &str| s.parse::<usize>().ok();
    let (count, dim) = match head.as_slice() {
        [c, d] => match (parse_usize(c), parse_usize(d)) {
            (Some(c), Some(d)) if d > 0 => (c, d),
            _ => return Err(Error::parse(&source, 1, "header must be \"<count> <dim>\"")),
        },
        _ => return Err(Error::parse(&source, 1, "header must be \"<count> <dim>\"")),
    };
    let mut table = StaticWordTable::new(dim)?;
    let mut rows = 0usize;
    let mut vec = Vec::with_capacity(dim);
    for (i, line) in lines {
        let lineno = i + 1;
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("non-blank line has a token");
        vec.clear();
        for p in parts {
            let v: f32 = p
                .parse()
                .map_err(|_| Error::parse(&source, lineno, format!("invalid number {p:?}")))?;
            vec.push(v);
        }
        if vec.len() != dim {
            return Err(Error::parse(
                &source,
                lineno,
                format!("row for {word:?} has {} values, expected {dim}", vec.len()),
            ));
        }
        if table.insert(word, &vec)? {
            log::warn!(
                "{}:{lineno}: duplicate word {word:?}, keeping the last vector",
                source.as_ref().display()
            );
        }
        rows += 1;
    }
    if rows != count {
        return Err(Error::parse(
            &source,
            1,
            format!("header declares {count} rows, file has {rows}"),
        ));
    }
    Ok(table)
}
