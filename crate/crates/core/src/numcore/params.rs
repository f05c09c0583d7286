use super::{Scalar, Tensor};

/// A fixed, ordered collection of parameter tensors.
///
/// Gradient buffers are values of the same type, so the order returned by
/// [`tensors`](ParamSet::tensors) pairs each parameter with its gradient.
pub trait ParamSet<F: Scalar>: Clone {
    fn tensors(&self) -> Vec<&Tensor<F>>;
    fn tensors_mut(&mut self) -> Vec<&mut Tensor<F>>;

    fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.zero();
        z
    }

    fn zero(&mut self) {
        for t in self.tensors_mut() {
            t.fill(F::zero());
        }
    }

    fn accumulate(&mut self, other: &Self) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.add_assign(b);
        }
    }

    fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }
}

impl<F: Scalar> ParamSet<F> for Tensor<F> {
    fn tensors(&self) -> Vec<&Tensor<F>> {
        vec![self]
    }
    fn tensors_mut(&mut self) -> Vec<&mut Tensor<F>> {
        vec![self]
    }
}

impl<F: Scalar> ParamSet<F> for Vec<Tensor<F>> {
    fn tensors(&self) -> Vec<&Tensor<F>> {
        self.iter().collect()
    }
    fn tensors_mut(&mut self) -> Vec<&mut Tensor<F>> {
        self.iter_mut().collect()
    }
}

impl<F: Scalar, A: ParamSet<F>, B: ParamSet<F>> ParamSet<F> for (A, B) {
    fn tensors(&self) -> Vec<&Tensor<F>> {
        let mut v = self.0.tensors();
        v.extend(self.1.tensors());
        v
    }
    fn tensors_mut(&mut self) -> Vec<&mut Tensor<F>> {
        let mut v = self.0.tensors_mut();
        v.extend(self.1.tensors_mut());
        v
    }
}
