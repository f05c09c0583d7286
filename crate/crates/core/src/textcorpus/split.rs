use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// 80/10/10 train/validation/test.
pub const PAPER_RATIOS: (f64, f64, f64) = (0.8, 0.1, 0.1);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSplit {
    pub train: Vec<String>,
    pub valid: Vec<String>,
    pub test: Vec<String>,
}

/// Seeded partition by line.
///
/// Validation and test receive `max(1, ⌊n·r⌋)` lines, the remainder goes to
/// train. Each part keeps the input order.
pub fn split_corpus(lines: Vec<String>, ratios: (f64, f64, f64), seed: u64) -> Result<CorpusSplit> {
    let (rt, rv, rs) = ratios;
    if [rt, rv, rs].iter().any(|r| !(0.0..=1.0).contains(r)) || (rt + rv + rs - 1.0).abs() > 1e-9 {
        return Err(Error::Input(format!(
            "split ratios {ratios:?} must be in [0,1] and sum to 1"
        )));
    }
    let n = lines.len();
    if n < 3 {
        return Err(Error::Input(format!(
            "need at least 3 lines to split, got {n}"
        )));
    }
    let count = |r: f64| ((n as f64 * r + 1e-9).floor() as usize).max(1);
    let (n_valid, n_test) = (count(rv), count(rs));
    if n_valid + n_test >= n {
        return Err(Error::Input(format!(
            "{n} lines are too few for ratios {ratios:?}"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut part = vec![0u8; n];
    for &i in &order[..n_valid] {
        part[i] = 1;
    }
    for &i in &order[n_valid..n_valid + n_test] {
        part[i] = 2;
    }
    let mut out = CorpusSplit {
        train: Vec::new(),
        valid: Vec::new(),
        test: Vec::new(),
    };
    for (line, p) in lines.into_iter().zip(part) {
        match p {
            0 => out.train.push(line),
            1 => out.valid.push(line),
            _ => out.test.push(line),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("line {i}")).collect()
    }

    #[test]
    fn ten_lines() {
        let s = split_corpus(lines(10), PAPER_RATIOS, 42).unwrap();
        assert_eq!((s.train.len(), s.valid.len(), s.test.len()), (8, 1, 1));
    }

    #[test]
    fn three_lines() {
        let s = split_corpus(lines(3), PAPER_RATIOS, 42).unwrap();
        assert_eq!((s.train.len(), s.valid.len(), s.test.len()), (1, 1, 1));
    }

    #[test]
    fn too_few_or_bad_ratios() {
        assert!(split_corpus(lines(2), PAPER_RATIOS, 1).is_err());
        assert!(split_corpus(lines(10), (0.5, 0.1, 0.1), 1).is_err());
    }

    #[test]
    fn seeded() {
        let a = split_corpus(lines(50), PAPER_RATIOS, 7).unwrap();
        let b = split_corpus(lines(50), PAPER_RATIOS, 7).unwrap();
        let c = split_corpus(lines(50), PAPER_RATIOS, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    proptest::proptest! {
        #[test]
        fn partition_is_exact(n in 3usize..200, seed in 0u64..1000) {
            let input = lines(n);
            let s = split_corpus(input.clone(), PAPER_RATIOS, seed).unwrap();
            let mut all: Vec<String> = s.train.iter().chain(&s.valid).chain(&s.test).cloned().collect();
            all.sort();
            let mut want = input;
            want.sort();
            proptest::prop_assert_eq!(all, want);
        }
    }
}
