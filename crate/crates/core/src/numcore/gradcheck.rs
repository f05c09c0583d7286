use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    gru_cell, gru_cell_backward, linear_backward, linear_forward, lstm_cell, lstm_cell_backward,
    softmax_xent, GruParams, LinearParams, LstmParams, ParamSet, Tensor,
};
use crate::tagger::crf;
use crate::Result;

/// `|a − n| / max(|a|, |n|)`, with the denominator floored at 1e-5.
///
/// Rounding in a central difference with ε = 1e-5 leaves noise around 1e-10
/// even when the true gradient is exactly zero; the floor keeps that noise
/// from reading as a large relative error on vanishing coordinates.
pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    let denom = analytic.abs().max(numeric.abs()).max(1e-5);
    (analytic - numeric).abs() / denom
}

/// Largest relative error between `analytic` and central differences
/// `(f(θ+ε) − f(θ−ε)) / 2ε`, taken over every coordinate of `point`.
pub fn grad_check<P, L>(point: &P, analytic: &P, eps: f64, loss: L) -> f64
where
    P: ParamSet<f64>,
    L: Fn(&P) -> f64,
{
    let mut probe = point.clone();
    let shapes: Vec<usize> = point.tensors().iter().map(|t| t.len()).collect();
    let grads: Vec<Vec<f64>> = analytic
        .tensors()
        .iter()
        .map(|t| t.data().to_vec())
        .collect();
    let mut worst = 0.0f64;
    for (ti, &len) in shapes.iter().enumerate() {
        for j in 0..len {
            let orig = probe.tensors()[ti].data()[j];
            probe.tensors_mut()[ti].data_mut()[j] = orig + eps;
            let up = loss(&probe);
            probe.tensors_mut()[ti].data_mut()[j] = orig - eps;
            let down = loss(&probe);
            probe.tensors_mut()[ti].data_mut()[j] = orig;
            let numeric = (up - down) / (2.0 * eps);
            worst = worst.max(rel_err(grads[ti][j], numeric));
        }
    }
    worst
}

/// Layers covered by the built-in gradient suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerCheck {
    Linear,
    LstmCell,
    GruCell,
    SoftmaxXent,
    Crf,
}

impl LayerCheck {
    pub const ALL: [LayerCheck; 5] = [
        LayerCheck::Linear,
        LayerCheck::LstmCell,
        LayerCheck::GruCell,
        LayerCheck::SoftmaxXent,
        LayerCheck::Crf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LayerCheck::Linear => "linear",
            LayerCheck::LstmCell => "lstm_cell",
            LayerCheck::GruCell => "gru_cell",
            LayerCheck::SoftmaxXent => "softmax_xent",
            LayerCheck::Crf => "crf_nll",
        }
    }
}

fn random_vec<R: Rng>(n: usize, rng: &mut R) -> Tensor<f64> {
    Tensor::uniform(&[n], 1.0, rng)
}

fn weighted(w: &[f64], v: &[f64]) -> f64 {
    w.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Runs a finite-difference check of one layer on a random 64-bit instance,
/// covering both parameters and inputs. Returns the max relative error.
pub fn check_layer(layer: LayerCheck, seed: u64, eps: f64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match layer {
        LayerCheck::Linear => {
            let (i, o) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let p = LinearParams::<f64>::new(i, o, &mut rng);
            let x = random_vec(i, &mut rng);
            let w = random_vec(o, &mut rng);
            let mut g = p.zeros_like();
            let dx = linear_backward(&p, x.data(), w.data(), &mut g)?;
            let point = (p, vec![x]);
            let analytic = (g, vec![Tensor::vector(dx)?]);
            Ok(grad_check(&point, &analytic, eps, |(p, xs)| {
                weighted(
                    w.data(),
                    &linear_forward(p, xs[0].data()).expect("shapes fixed"),
                )
            }))
        }
        LayerCheck::LstmCell => {
            let (i, h) = (rng.gen_range(1..5), rng.gen_range(1..5));
            let p = LstmParams::<f64>::new(i, h, &mut rng);
            let (x, hp, cp) = (
                random_vec(i, &mut rng),
                random_vec(h, &mut rng),
                random_vec(h, &mut rng),
            );
            let (wh, wc) = (random_vec(h, &mut rng), random_vec(h, &mut rng));
            let step = lstm_cell(x.data(), hp.data(), cp.data(), &p)?;
            let mut g = p.zeros_like();
            let (dx, dh, dc) = lstm_cell_backward(&step, wh.data(), wc.data(), &p, &mut g)?;
            let point = (p, vec![x, hp, cp]);
            let analytic = (
                g,
                vec![
                    Tensor::vector(dx)?,
                    Tensor::vector(dh)?,
                    Tensor::vector(dc)?,
                ],
            );
            Ok(grad_check(&point, &analytic, eps, |(p, xs)| {
                let s =
                    lstm_cell(xs[0].data(), xs[1].data(), xs[2].data(), p).expect("shapes fixed");
                weighted(wh.data(), &s.h) + weighted(wc.data(), &s.c)
            }))
        }
        LayerCheck::GruCell => {
            let (i, h) = (rng.gen_range(1..5), rng.gen_range(1..5));
            let p = GruParams::<f64>::new(i, h, &mut rng);
            let (x, hp) = (random_vec(i, &mut rng), random_vec(h, &mut rng));
            let wh = random_vec(h, &mut rng);
            let step = gru_cell(x.data(), hp.data(), &p)?;
            let mut g = p.zeros_like();
            let (dx, dh) = gru_cell_backward(&step, wh.data(), &p, &mut g)?;
            let point = (p, vec![x, hp]);
            let analytic = (g, vec![Tensor::vector(dx)?, Tensor::vector(dh)?]);
            Ok(grad_check(&point, &analytic, eps, |(p, xs)| {
                weighted(
                    wh.data(),
                    &gru_cell(xs[0].data(), xs[1].data(), p)
                        .expect("shapes fixed")
                        .h,
                )
            }))
        }
        LayerCheck::SoftmaxXent => {
            let k = rng.gen_range(2..8);
            let target = rng.gen_range(0..k);
            let logits = Tensor::<f64>::uniform(&[k], 3.0, &mut rng);
            let (_, d) = softmax_xent(logits.data(), target)?;
            let analytic = Tensor::vector(d)?;
            Ok(grad_check(&logits, &analytic, eps, |l| {
                softmax_xent(l.data(), target).expect("target in range").0
            }))
        }
        LayerCheck::Crf => {
            let (n, k) = (rng.gen_range(1..=5), rng.gen_range(1..=4));
            let emissions = Tensor::<f64>::uniform(&[n, k], 1.0, &mut rng);
            let mut transitions = Tensor::<f64>::uniform(&[k + 2, k + 2], 1.0, &mut rng);
            crf::mask_transitions(&mut transitions);
            let gold: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let out = crf::crf_nll(&emissions, &transitions, &gold)?;
            let point = vec![emissions, transitions];
            let analytic = vec![out.d_emissions, out.d_transitions];
            Ok(grad_check(&point, &analytic, eps, |v| {
                crf::crf_nll(&v[0], &v[1], &gold)
                    .expect("shapes fixed")
                    .loss
            }))
        }
    }
}
