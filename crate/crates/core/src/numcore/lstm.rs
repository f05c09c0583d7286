use rand::Rng;

use super::{check_len, matvec_acc, matvec_t_acc, outer_acc, sigmoid, ParamSet, Scalar, Tensor};
use crate::{Error, Result};

/// LSTM weights. Gate blocks are stacked in the order
/// (input, forget, cell candidate, output), each `H` rows tall.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmParams<F = f32> {
    /// `[4H × I]`
    pub w_ih: Tensor<F>,
    /// `[4H × H]`
    pub w_hh: Tensor<F>,
    /// `[4H]`
    pub bias: Tensor<F>,
}

impl<F: Scalar> LstmParams<F> {
    pub fn new<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (hidden as f64).sqrt();
        LstmParams {
            w_ih: Tensor::uniform(&[4 * hidden, input], bound, rng),
            w_hh: Tensor::uniform(&[4 * hidden, hidden], bound, rng),
            bias: Tensor::uniform(&[4 * hidden], bound, rng),
        }
    }

    pub fn zeros(input: usize, hidden: usize) -> Self {
        LstmParams {
            w_ih: Tensor::zeros(&[4 * hidden, input]),
            w_hh: Tensor::zeros(&[4 * hidden, hidden]),
            bias: Tensor::zeros(&[4 * hidden]),
        }
    }

    pub fn from_parts(w_ih: Tensor<F>, w_hh: Tensor<F>, bias: Tensor<F>) -> Result<Self> {
        let ok = w_ih.rank() == 2
            && w_hh.rank() == 2
            && bias.rank() == 1
            && w_ih.rows().is_multiple_of(4)
            && w_hh.rows() == w_ih.rows()
            && w_hh.cols() * 4 == w_hh.rows()
            && bias.len() == w_ih.rows();
        if !ok {
            return Err(Error::shape(format!(
                "inconsistent LSTM shapes: w_ih {:?}, w_hh {:?}, bias {:?}",
                w_ih.shape(),
                w_hh.shape(),
                bias.shape()
            )));
        }
        Ok(LstmParams { w_ih, w_hh, bias })
    }

    pub fn input_size(&self) -> usize {
        self.w_ih.cols()
    }

    pub fn hidden_size(&self) -> usize {
        self.w_hh.cols()
    }
}

impl<F: Scalar> ParamSet<F> for LstmParams<F> {
    fn tensors(&self) -> Vec<&Tensor<F>> {
        vec![&self.w_ih, &self.w_hh, &self.bias]
    }
    fn tensors_mut(&mut self) -> Vec<&mut Tensor<F>> {
        vec![&mut self.w_ih, &mut self.w_hh, &mut self.bias]
    }
}

/// One LSTM time step: outputs plus everything the backward pass needs.
#[derive(Clone, Debug)]
pub struct LstmStep<F = f32> {
    pub x: Vec<F>,
    pub h_prev: Vec<F>,
    pub c_prev: Vec<F>,
    /// Post-activation gates `[i, f, g, o]`, `4H`.
    pub gates: Vec<F>,
    pub c: Vec<F>,
    pub tanh_c: Vec<F>,
    pub h: Vec<F>,
}

pub fn lstm_cell<F: Scalar>(
    x: &[F],
    h_prev: &[F],
    c_prev: &[F],
    p: &LstmParams<F>,
) -> Result<LstmStep<F>> {
    let hs = p.hidden_size();
    check_len("lstm input", x.len(), p.input_size())?;
    check_len("lstm h_prev", h_prev.len(), hs)?;
    check_len("lstm c_prev", c_prev.len(), hs)?;

    let mut gates = p.bias.data().to_vec();
    matvec_acc(&p.w_ih, x, &mut gates);
    matvec_acc(&p.w_hh, h_prev, &mut gates);
    for (k, v) in gates.iter_mut().enumerate() {
        *v = if (2 * hs..3 * hs).contains(&k) {
            v.tanh()
        } else {
            sigmoid(*v)
        };
    }
    let mut c = vec![F::zero(); hs];
    let mut tanh_c = vec![F::zero(); hs];
    let mut h = vec![F::zero(); hs];
    for j in 0..hs {
        let (i, f, g, o) = (
            gates[j],
            gates[hs + j],
            gates[2 * hs + j],
            gates[3 * hs + j],
        );
        c[j] = f * c_prev[j] + i * g;
        tanh_c[j] = c[j].tanh();
        h[j] = o * tanh_c[j];
    }
    Ok(LstmStep {
        x: x.to_vec(),
        h_prev: h_prev.to_vec(),
        c_prev: c_prev.to_vec(),
        gates,
        c,
        tanh_c,
        h,
    })
}

/// Backward through one step given upstream `dh` and `dc`.
///
/// Parameter gradients accumulate into `grads`; returns `(dx, dh_prev, dc_prev)`.
pub fn lstm_cell_backward<F: Scalar>(
    step: &LstmStep<F>,
    dh: &[F],
    dc: &[F],
    p: &LstmParams<F>,
    grads: &mut LstmParams<F>,
) -> Result<(Vec<F>, Vec<F>, Vec<F>)> {
    let (dx, dh_prev, dc_prev) = lstm_backward_impl(step, dh, dc, p, grads, true)?;
    Ok((dx.expect("requested"), dh_prev, dc_prev))
}

/// Backward pass that optionally skips the input gradient.
pub(crate) fn lstm_backward_impl<F: Scalar>(
    step: &LstmStep<F>,
    dh: &[F],
    dc: &[F],
    p: &LstmParams<F>,
    grads: &mut LstmParams<F>,
    want_dx: bool,
) -> Result<(Option<Vec<F>>, Vec<F>, Vec<F>)> {
    let hs = p.hidden_size();
    if step.x.len() != p.input_size() || step.h.len() != hs || step.gates.len() != 4 * hs {
        return Err(Error::shape("LSTM step record does not match parameters"));
    }
    check_len("lstm dh", dh.len(), hs)?;
    check_len("lstm dc", dc.len(), hs)?;

    let one = F::one();
    let g = &step.gates;
    let mut dpre = vec![F::zero(); 4 * hs];
    let mut dc_prev = vec![F::zero(); hs];
    for j in 0..hs {
        let (i, f, gg, o) = (g[j], g[hs + j], g[2 * hs + j], g[3 * hs + j]);
        let tc = step.tanh_c[j];
        let dct = dc[j] + dh[j] * o * (one - tc * tc);
        let d_o = dh[j] * tc;
        let d_i = dct * gg;
        let d_g = dct * i;
        let d_f = dct * step.c_prev[j];
        dc_prev[j] = dct * f;
        dpre[j] = d_i * i * (one - i);
        dpre[hs + j] = d_f * f * (one - f);
        dpre[2 * hs + j] = d_g * (one - gg * gg);
        dpre[3 * hs + j] = d_o * o * (one - o);
    }
    outer_acc(&mut grads.w_ih, &dpre, &step.x);
    outer_acc(&mut grads.w_hh, &dpre, &step.h_prev);
    super::add_into(grads.bias.data_mut(), &dpre);

    let dx = want_dx.then(|| {
        let mut dx = vec![F::zero(); step.x.len()];
        matvec_t_acc(&p.w_ih, &dpre, &mut dx);
        dx
    });
    let mut dh_prev = vec![F::zero(); hs];
    matvec_t_acc(&p.w_hh, &dpre, &mut dh_prev);
    Ok((dx, dh_prev, dc_prev))
}
