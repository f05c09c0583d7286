//! String ↔ id bijections for tags and class labels.

use std::collections::HashMap;

use crate::{Error, Result};

/// Dense ids `0..len` in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelIndex {
    names: Vec<String>,
    ids: HashMap<String, usize>,
}

impl LabelIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails on duplicates.
    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut idx = Self::new();
        for n in names {
            let n = n.into();
            if idx.ids.contains_key(&n) {
                return Err(Error::Data(format!("duplicate label {n:?}")));
            }
            idx.insert(n);
        }
        Ok(idx)
    }

    /// Returns the id of `name`, adding it if unseen.
    pub fn insert(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        if let Some(&id) = self.ids.get(&name) {
            return id;
        }
        let id = self.names.len();
        self.ids.insert(name.clone(), id);
        self.names.push(name);
        id
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}
