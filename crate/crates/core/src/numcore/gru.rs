use rand::Rng;

use super::{check_len, matvec_acc, matvec_t_acc, outer_acc, sigmoid, ParamSet, Scalar, Tensor};
use crate::{Error, Result};

/// GRU weights. Gate blocks are stacked as (reset, update, candidate).
///
/// The candidate uses the reset gate on the recurrent projection:
/// `n = tanh(W_n x + b_in + r ⊙ (U_n h + b_hn))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GruParams<F = f32> {
    /// `[3H × I]`
    pub w_ih: Tensor<F>,
    /// `[3H × H]`
    pub w_hh: Tensor<F>,
    pub b_ih: Tensor<F>,
    pub b_hh: Tensor<F>,
}

impl<F: Scalar> GruParams<F> {
    pub fn new<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (hidden as f64).sqrt();
        GruParams {
            w_ih: Tensor::uniform(&[3 * hidden, input], bound, rng),
            w_hh: Tensor::uniform(&[3 * hidden, hidden], bound, rng),
            b_ih: Tensor::uniform(&[3 * hidden], bound, rng),
            b_hh: Tensor::uniform(&[3 * hidden], bound, rng),
        }
    }

    pub fn zeros(input: usize, hidden: usize) -> Self {
        GruParams {
            w_ih: Tensor::zeros(&[3 * hidden, input]),
            w_hh: Tensor::zeros(&[3 * hidden, hidden]),
            b_ih: Tensor::zeros(&[3 * hidden]),
            b_hh: Tensor::zeros(&[3 * hidden]),
        }
    }

    pub fn from_parts(
        w_ih: Tensor<F>,
        w_hh: Tensor<F>,
        b_ih: Tensor<F>,
        b_hh: Tensor<F>,
    ) -> Result<Self> {
        let ok = w_ih.rank() == 2
            && w_hh.rank() == 2
            && w_ih.rows().is_multiple_of(3)
            && w_hh.rows() == w_ih.rows()
            && w_hh.cols() * 3 == w_hh.rows()
            && b_ih.shape() == [w_ih.rows()]
            && b_hh.shape() == [w_ih.rows()];
        if !ok {
            return Err(Error::shape(format!(
                "inconsistent GRU shapes: w_ih {:?}, w_hh {:?}, b_ih {:?}, b_hh {:?}",
                w_ih.shape(),
                w_hh.shape(),
                b_ih.shape(),
                b_hh.shape()
            )));
        }
        Ok(GruParams {
            w_ih,
            w_hh,
            b_ih,
            b_hh,
        })
    }

    pub fn input_size(&self) -> usize {
        self.w_ih.cols()
    }

    pub fn hidden_size(&self) -> usize {
        self.w_hh.cols()
    }
}

impl<F: Scalar> ParamSet<F> for GruParams<F> {
    fn tensors(&self) -> Vec<&Tensor<F>> {
        vec![&self.w_ih, &self.w_hh, &self.b_ih, &self.b_hh]
    }
    fn tensors_mut(&mut self) -> Vec<&mut Tensor<F>> {
        vec![
            &mut self.w_ih,
            &mut self.w_hh,
            &mut self.b_ih,
            &mut self.b_hh,
        ]
    }
}

#[derive(Clone, Debug)]
pub struct GruStep<F = f32> {
    pub x: Vec<F>,
    pub h_prev: Vec<F>,
    pub r: Vec<F>,
    pub z: Vec<F>,
    pub n: Vec<F>,
    /// `U_n h_prev + b_hn`, before the reset gate is applied.
    pub hn: Vec<F>,
    pub h: Vec<F>,
}

pub fn gru_cell<F: Scalar>(x: &[F], h_prev: &[F], p: &GruParams<F>) -> Result<GruStep<F>> {
    let hs = p.hidden_size();
    check_len("gru input", x.len(), p.input_size())?;
    check_len("gru h_prev", h_prev.len(), hs)?;

    let mut gi = p.b_ih.data().to_vec();
    matvec_acc(&p.w_ih, x, &mut gi);
    let mut gh = p.b_hh.data().to_vec();
    matvec_acc(&p.w_hh, h_prev, &mut gh);

    let mut r = vec![F::zero(); hs];
    let mut z = vec![F::zero(); hs];
    let mut n = vec![F::zero(); hs];
    let mut h = vec![F::zero(); hs];
    for j in 0..hs {
        r[j] = sigmoid(gi[j] + gh[j]);
        z[j] = sigmoid(gi[hs + j] + gh[hs + j]);
        n[j] = (gi[2 * hs + j] + r[j] * gh[2 * hs + j]).tanh();
        h[j] = (F::one() - z[j]) * n[j] + z[j] * h_prev[j];
    }
    Ok(GruStep {
        x: x.to_vec(),
        h_prev: h_prev.to_vec(),
        r,
        z,
        n,
        hn: gh[2 * hs..].to_vec(),
        h,
    })
}

/// Returns `(dx, dh_prev)`; parameter gradients accumulate into `grads`.
pub fn gru_cell_backward<F: Scalar>(
    step: &GruStep<F>,
    dh: &[F],
    p: &GruParams<F>,
    grads: &mut GruParams<F>,
) -> Result<(Vec<F>, Vec<F>)> {
    let (dx, dh_prev) = gru_backward_impl(step, dh, p, grads, true)?;
    Ok((dx.expect("requested"), dh_prev))
}

pub(crate) fn gru_backward_impl<F: Scalar>(
    step: &GruStep<F>,
    dh: &[F],
    p: &GruParams<F>,
    grads: &mut GruParams<F>,
    want_dx: bool,
) -> Result<(Option<Vec<F>>, Vec<F>)> {
    let hs = p.hidden_size();
    if step.x.len() != p.input_size() || step.h.len() != hs {
        return Err(Error::shape("GRU step record does not match parameters"));
    }
    check_len("gru dh", dh.len(), hs)?;

    let one = F::one();
    let mut dgi = vec![F::zero(); 3 * hs];
    let mut dgh = vec![F::zero(); 3 * hs];
    let mut dh_prev = vec![F::zero(); hs];
    for j in 0..hs {
        let (r, z, n) = (step.r[j], step.z[j], step.n[j]);
        let dn = dh[j] * (one - z);
        let dz = dh[j] * (step.h_prev[j] - n);
        dh_prev[j] = dh[j] * z;
        let dpre_n = dn * (one - n * n);
        let dr = dpre_n * step.hn[j];
        let dpre_r = dr * r * (one - r);
        let dpre_z = dz * z * (one - z);
        dgi[j] = dpre_r;
        dgi[hs + j] = dpre_z;
        dgi[2 * hs + j] = dpre_n;
        dgh[j] = dpre_r;
        dgh[hs + j] = dpre_z;
        dgh[2 * hs + j] = dpre_n * r;
    }
    outer_acc(&mut grads.w_ih, &dgi, &step.x);
    outer_acc(&mut grads.w_hh, &dgh, &step.h_prev);
    super::add_into(grads.b_ih.data_mut(), &dgi);
    super::add_into(grads.b_hh.data_mut(), &dgh);

    let dx = want_dx.then(|| {
        let mut dx = vec![F::zero(); step.x.len()];
        matvec_t_acc(&p.w_ih, &dgi, &mut dx);
        dx
    });
    matvec_t_acc(&p.w_hh, &dgh, &mut dh_prev);
    Ok((dx, dh_prev))
}
