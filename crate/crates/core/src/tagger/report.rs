use std::fmt;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TagRow {
    pub tag: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold occurrences.
    pub support: usize,
    pub predicted: usize,
}

/// Per-tag scores plus pooled micro-F1.
///
/// A tag with no predictions gets precision 1.0 and one with no gold
/// occurrences gets recall 1.0, so that a never-predicted tag reads as
/// `1.0000 0.0000 0.0000`. Tags absent from both sides are omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct TagReport {
    pub rows: Vec<TagRow>,
    pub micro_f1: f64,
    pub tokens: usize,
    pub correct: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

impl TagReport {
    /// Scores parallel gold/predicted tag sequences. Rows follow `order`
    /// first, then any other tags in order of first appearance.
    pub fn compute<S: AsRef<str>>(
        order: &[S],
        gold: &[Vec<String>],
        pred: &[Vec<String>],
    ) -> Result<Self> {
        if gold.len() != pred.len() {
            return Err(Error::Input(format!(
                "{} gold sentences but {} predictions",
                gold.len(),
                pred.len()
            )));
        }
        let mut names: Vec<String> = order.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut counts: Vec<[usize; 3]> = vec![[0; 3]; names.len()]; // tp, gold, pred
        let slot = |names: &mut Vec<String>, counts: &mut Vec<[usize; 3]>, t: &str| -> usize {
            match names.iter().position(|n| n == t) {
                Some(i) => i,
                None => {
                    names.push(t.to_owned());
                    counts.push([0; 3]);
                    names.len() - 1
                }
            }
        };
        let (mut tokens, mut correct) = (0, 0);
        for (k, (g, p)) in gold.iter().zip(pred).enumerate() {
            if g.len() != p.len() {
                return Err(Error::Input(format!(
                    "sentence {k}: {} gold tags but {} predicted",
                    g.len(),
                    p.len()
                )));
            }
            for (gt, pt) in g.iter().zip(p) {
                let gi = slot(&mut names, &mut counts, gt);
                let pi = slot(&mut names, &mut counts, pt);
                counts[gi][1] += 1;
                counts[pi][2] += 1;
                tokens += 1;
                if gi == pi {
                    counts[gi][0] += 1;
                    correct += 1;
                }
            }
        }
        let rows = names
            .into_iter()
            .zip(counts)
            .filter(|(_, c)| c[1] + c[2] > 0)
            .map(|(tag, [tp, g, p])| {
                let precision = ratio(tp, p);
                let recall = ratio(tp, g);
                let f1 = if precision + recall == 0.0 {
                    0.0
                } else {
                    2.0 * precision * recall / (precision + recall)
                };
                TagRow {
                    tag,
                    precision,
                    recall,
                    f1,
                    support: g,
                    predicted: p,
                }
            })
            .collect();
        // pooled P = pooled R = accuracy, so micro-F1 is accuracy
        let micro_f1 = if tokens == 0 {
            0.0
        } else {
            correct as f64 / tokens as f64
        };
        Ok(TagReport {
            rows,
            micro_f1,
            tokens,
            correct,
        })
    }

    pub fn row(&self, tag: &str) -> Option<&TagRow> {
        self.rows.iter().find(|r| r.tag == tag)
    }
}

impl fmt::Display for TagReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self
            .rows
            .iter()
            .map(|r| r.tag.chars().count())
            .chain([8])
            .max()
            .unwrap_or(8);
        writeln!(
            f,
            "{:<w$}  {:>9}  {:>9}  {:>9}",
            "Tags", "Precision", "Recall", "F1-score"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<w$}  {:>9.4}  {:>9.4}  {:>9.4}",
                r.tag, r.precision, r.recall, r.f1
            )?;
        }
        writeln!(
            f,
            "{:<w$}  {:>9}  {:>9}  {:>9.2}",
            "F1-score",
            "",
            "",
            self.micro_f1 * 100.0
        )
    }
}
