//! Linear-chain CRF scoring, forward algorithm and Viterbi decoding.
//!
//! Transitions are a `(K+2)×(K+2)` matrix where `T[i][j]` scores moving from
//! tag `i` to tag `j`. Index `K` is the virtual START tag and `K+1` the
//! virtual STOP tag. Entries into START and out of STOP hold [`MASK`].

use crate::numcore::{Scalar, Tensor};
use crate::{Error, Result};

/// Stand-in for −∞ on masked transitions.
pub const MASK: f64 = -1e9;

pub fn start_id(num_tags: usize) -> usize {
    num_tags
}

pub fn stop_id(num_tags: usize) -> usize {
    num_tags + 1
}

/// Writes [`MASK`] into every transition into START and out of STOP.
pub fn mask_transitions<F: Scalar>(t: &mut Tensor<F>) {
    let k = t.rows() - 2;
    let (start, stop) = (start_id(k), stop_id(k));
    for i in 0..k + 2 {
        t.set2(i, start, F::of(MASK));
        t.set2(stop, i, F::of(MASK));
    }
}

fn dims<F: Scalar>(emissions: &Tensor<F>, transitions: &Tensor<F>) -> Result<(usize, usize)> {
    if emissions.rank() != 2 {
        return Err(Error::shape(format!(
            "emissions must be n×K, got {:?}",
            emissions.shape()
        )));
    }
    let (n, k) = (emissions.rows(), emissions.cols());
    if transitions.shape() != [k + 2, k + 2] {
        return Err(Error::shape(format!(
            "transitions must be {}×{} for {k} tags, got {:?}",
            k + 2,
            k + 2,
            transitions.shape()
        )));
    }
    Ok((n, k))
}

fn check_path(path: &[usize], n: usize, k: usize) -> Result<()> {
    if path.len() != n {
        return Err(Error::Input(format!(
            "tag path has length {}, sequence has {n}",
            path.len()
        )));
    }
    if let Some(&bad) = path.iter().find(|&&y| y >= k) {
        return Err(Error::Input(format!(
            "tag id {bad} out of range for {k} tags"
        )));
    }
    Ok(())
}

fn log_sum_exp<F: Scalar>(xs: impl Iterator<Item = F> + Clone) -> F {
    let max = xs.clone().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    max + xs.map(|x| (x - max).exp()).sum::<F>().ln()
}

/// Unnormalised score of one tag path, START and STOP transitions included.
pub fn path_score<F: Scalar>(
    emissions: &Tensor<F>,
    transitions: &Tensor<F>,
    path: &[usize],
) -> Result<F> {
    let (n, k) = dims(emissions, transitions)?;
    check_path(path, n, k)?;
    let mut s = transitions.get2(start_id(k), path[0]);
    for t in 0..n {
        s += emissions.get2(t, path[t]);
        if t > 0 {
            s += transitions.get2(path[t - 1], path[t]);
        }
    }
    Ok(s + transitions.get2(path[n - 1], stop_id(k)))
}

/// `alpha[t][j]`: log-sum of all prefixes ending in tag `j` at `t`.
fn forward_table<F: Scalar>(e: &Tensor<F>, tr: &Tensor<F>, n: usize, k: usize) -> Vec<F> {
    let mut alpha = vec![F::zero(); n * k];
    for j in 0..k {
        alpha[j] = tr.get2(start_id(k), j) + e.get2(0, j);
    }
    for t in 1..n {
        for j in 0..k {
            let prev = &alpha[(t - 1) * k..t * k];
            alpha[t * k + j] = e.get2(t, j) + log_sum_exp((0..k).map(|i| prev[i] + tr.get2(i, j)));
        }
    }
    alpha
}

/// Log partition function via the forward algorithm.
pub fn log_partition<F: Scalar>(emissions: &Tensor<F>, transitions: &Tensor<F>) -> Result<F> {
    let (n, k) = dims(emissions, transitions)?;
    let alpha = forward_table(emissions, transitions, n, k);
    let last = &alpha[(n - 1) * k..];
    Ok(log_sum_exp(
        (0..k).map(|j| last[j] + transitions.get2(j, stop_id(k))),
    ))
}

/// Negative log-likelihood of a gold path with its gradients.
#[derive(Clone, Debug)]
pub struct CrfOutput<F> {
    pub loss: F,
    pub log_z: F,
    pub gold_score: F,
    /// `[n×K]`
    pub d_emissions: Tensor<F>,
    /// `[(K+2)×(K+2)]`; masked entries always receive zero.
    pub d_transitions: Tensor<F>,
}

/// `loss = logZ − score(gold)`, gradients from forward–backward marginals.
pub fn crf_nll<F: Scalar>(
    emissions: &Tensor<F>,
    transitions: &Tensor<F>,
    gold: &[usize],
) -> Result<CrfOutput<F>> {
    let (n, k) = dims(emissions, transitions)?;
    check_path(gold, n, k)?;
    let (start, stop) = (start_id(k), stop_id(k));
    let e = emissions;
    let tr = transitions;

    let alpha = forward_table(e, tr, n, k);
    let last = &alpha[(n - 1) * k..];
    let log_z = log_sum_exp((0..k).map(|j| last[j] + tr.get2(j, stop)));

    // beta[t][i]: log-sum of all suffixes after being in tag i at t.
    let mut beta = vec![F::zero(); n * k];
    for i in 0..k {
        beta[(n - 1) * k + i] = tr.get2(i, stop);
    }
    for t in (0..n - 1).rev() {
        for i in 0..k {
            let next = &beta[(t + 1) * k..(t + 2) * k];
            beta[t * k + i] =
                log_sum_exp((0..k).map(|j| tr.get2(i, j) + e.get2(t + 1, j) + next[j]));
        }
    }

    let mut d_e = Tensor::zeros(&[n, k]);
    let mut d_t = Tensor::zeros(&[k + 2, k + 2]);
    for t in 0..n {
        for j in 0..k {
            let p = (alpha[t * k + j] + beta[t * k + j] - log_z).exp();
            d_e.set2(t, j, p);
        }
    }
    for j in 0..k {
        d_t.set2(start, j, d_e.get2(0, j));
        d_t.set2(j, stop, d_e.get2(n - 1, j));
    }
    for t in 0..n - 1 {
        for i in 0..k {
            for j in 0..k {
                let p =
                    (alpha[t * k + i] + tr.get2(i, j) + e.get2(t + 1, j) + beta[(t + 1) * k + j]
                        - log_z)
                        .exp();
                d_t.set2(i, j, d_t.get2(i, j) + p);
            }
        }
    }

    let one = F::one();
    d_t.set2(start, gold[0], d_t.get2(start, gold[0]) - one);
    d_t.set2(gold[n - 1], stop, d_t.get2(gold[n - 1], stop) - one);
    for t in 0..n {
        d_e.set2(t, gold[t], d_e.get2(t, gold[t]) - one);
        if t > 0 {
            d_t.set2(gold[t - 1], gold[t], d_t.get2(gold[t - 1], gold[t]) - one);
        }
    }

    let gold_score = path_score(e, tr, gold)?;
    Ok(CrfOutput {
        loss: log_z - gold_score,
        log_z,
        gold_score,
        d_emissions: d_e,
        d_transitions: d_t,
    })
}

/// Highest-scoring tag path and its score.
///
/// Ties go to the lower tag id, both for the final tag and at every
/// back-pointer.
pub fn viterbi<F: Scalar>(
    emissions: &Tensor<F>,
    transitions: &Tensor<F>,
) -> Result<(Vec<usize>, F)> {
    let (n, k) = dims(emissions, transitions)?;
    let tr = transitions;
    let mut delta = vec![F::zero(); n * k];
    let mut back = vec![0usize; n * k];
    for j in 0..k {
        delta[j] = tr.get2(start_id(k), j) + emissions.get2(0, j);
    }
    for t in 1..n {
        for j in 0..k {
            let mut best = 0;
            let mut best_score = delta[(t - 1) * k] + tr.get2(0, j);
            for i in 1..k {
                let s = delta[(t - 1) * k + i] + tr.get2(i, j);
                if s > best_score {
                    best = i;
                    best_score = s;
                }
            }
            delta[t * k + j] = best_score + emissions.get2(t, j);
            back[t * k + j] = best;
        }
    }
    let stop = stop_id(k);
    let mut last = 0;
    let mut best_score = delta[(n - 1) * k] + tr.get2(0, stop);
    for j in 1..k {
        let s = delta[(n - 1) * k + j] + tr.get2(j, stop);
        if s > best_score {
            last = j;
            best_score = s;
        }
    }
    let mut path = vec![0; n];
    path[n - 1] = last;
    for t in (1..n).rev() {
        path[t - 1] = back[t * k + path[t]];
    }
    Ok((path, best_score))
}
