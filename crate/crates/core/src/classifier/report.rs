use std::fmt;

use crate::{Error, Result};

/// Accuracy with a `[gold × predicted]` confusion matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ClsReport {
    pub labels: Vec<String>,
    pub accuracy: f64,
    /// Gold count per class.
    pub counts: Vec<usize>,
    pub confusion: Vec<Vec<usize>>,
}

impl ClsReport {
    pub fn compute(labels: Vec<String>, gold: &[usize], pred: &[usize]) -> Result<Self> {
        let c = labels.len();
        if gold.len() != pred.len() {
            return Err(Error::Input(format!(
                "{} gold labels but {} predictions",
                gold.len(),
                pred.len()
            )));
        }
        if gold.is_empty() {
            return Err(Error::Input("empty test set".into()));
        }
        let mut confusion = vec![vec![0usize; c]; c];
        for (&g, &p) in gold.iter().zip(pred) {
            if g >= c || p >= c {
                return Err(Error::Input(format!(
                    "class id out of range for {c} classes"
                )));
            }
            confusion[g][p] += 1;
        }
        let counts = confusion.iter().map(|r| r.iter().sum()).collect();
        let trace: usize = (0..c).map(|i| confusion[i][i]).sum();
        Ok(ClsReport {
            labels,
            accuracy: trace as f64 / gold.len() as f64,
            counts,
            confusion,
        })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

impl fmt::Display for ClsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "accuracy {:.4} ({} examples)",
            self.accuracy,
            self.total()
        )?;
        let w = self
            .labels
            .iter()
            .map(|l| l.chars().count())
            .chain([6])
            .max()
            .unwrap_or(6);
        let cw = self
            .confusion
            .iter()
            .flatten()
            .map(|n| n.to_string().len())
            .chain(self.labels.iter().map(|l| l.chars().count()))
            .max()
            .unwrap_or(1);
        write!(f, "{:<w$}", "gold\\pred")?;
        for l in &self.labels {
            write!(f, "  {l:>cw$}")?;
        }
        writeln!(f)?;
        for (l, row) in self.labels.iter().zip(&self.confusion) {
            write!(f, "{l:<w$}")?;
            for n in row {
                write!(f, "  {n:>cw$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn hand_computed_example() {
        let r = ClsReport::compute(labels(2), &[0, 0, 1], &[0, 1, 1]).unwrap();
        assert!((r.accuracy - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.confusion, vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(r.counts, vec![2, 1]);
    }

    #[test]
    fn constant_predictor_on_balanced_three_classes() {
        let r = ClsReport::compute(labels(3), &[0, 1, 2, 0, 1, 2], &[1; 6]).unwrap();
        assert!((r.accuracy - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn all_correct() {
        let r = ClsReport::compute(labels(2), &[0, 1, 1], &[0, 1, 1]).unwrap();
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn text_has_accuracy_line_and_matrix() {
        let r = ClsReport::compute(labels(2), &[0, 0, 1], &[0, 1, 1]).unwrap();
        let s = r.to_string();
        let lines: Vec<_> = s.lines().collect();
        assert!(lines[0].starts_with("accuracy 0.6667"));
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("c0") && lines[2].trim_end().ends_with('1'));
    }

    #[test]
    fn bad_input() {
        assert!(ClsReport::compute(labels(2), &[], &[]).is_err());
        assert!(ClsReport::compute(labels(2), &[0], &[2]).is_err());
    }
}
