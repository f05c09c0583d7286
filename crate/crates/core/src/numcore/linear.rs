use rand::Rng;

use super::{check_len, matvec_acc, matvec_t_acc, outer_acc, ParamSet, Scalar, Tensor};
use crate::Result;

/// Affine projection `y = W x + b` with `W[O×I]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearParams<F = f32> {
    pub weight: Tensor<F>,
    pub bias: Tensor<F>,
}

impl<F: Scalar> LinearParams<F> {
    pub fn new<R: Rng>(input: usize, output: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (input as f64).sqrt();
        LinearParams {
            weight: Tensor::uniform(&[output, input], bound, rng),
            bias: Tensor::uniform(&[output], bound, rng),
        }
    }

    pub fn zeros(input: usize, output: usize) -> Self {
        LinearParams {
            weight: Tensor::zeros(&[output, input]),
            bias: Tensor::zeros(&[output]),
        }
    }

    pub fn from_parts(weight: Tensor<F>, bias: Tensor<F>) -> Result<Self> {
        if weight.rank() != 2 || bias.rank() != 1 || bias.len() != weight.rows() {
            return Err(crate::Error::shape(format!(
                "linear weight {:?} incompatible with bias {:?}",
                weight.shape(),
                bias.shape()
            )));
        }
        Ok(LinearParams { weight, bias })
    }

    pub fn input_size(&self) -> usize {
        self.weight.cols()
    }

    pub fn output_size(&self) -> usize {
        self.weight.rows()
    }
}

impl<F: Scalar> ParamSet<F> for LinearParams<F> {
    fn tensors(&self) -> Vec<&Tensor<F>> {
        vec![&self.weight, &self.bias]
    }
    fn tensors_mut(&mut self) -> Vec<&mut Tensor<F>> {
        vec![&mut self.weight, &mut self.bias]
    }
}

pub fn linear_forward<F: Scalar>(p: &LinearParams<F>, x: &[F]) -> Result<Vec<F>> {
    check_len("linear input", x.len(), p.input_size())?;
    let mut y = p.bias.data().to_vec();
    matvec_acc(&p.weight, x, &mut y);
    Ok(y)
}

/// Accumulates parameter gradients into `grads` and returns `dx`.
pub fn linear_backward<F: Scalar>(
    p: &LinearParams<F>,
    x: &[F],
    dy: &[F],
    grads: &mut LinearParams<F>,
) -> Result<Vec<F>> {
    check_len("linear input", x.len(), p.input_size())?;
    check_len("linear output gradient", dy.len(), p.output_size())?;
    outer_acc(&mut grads.weight, dy, x);
    super::add_into(grads.bias.data_mut(), dy);
    let mut dx = vec![F::zero(); x.len()];
    matvec_t_acc(&p.weight, dy, &mut dx);
    Ok(dx)
}
