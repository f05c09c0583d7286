use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};
use rand::Rng;

use crate::{Error, Result};

/// Floating-point element type. `f32` for training, `f64` for gradient checks.
pub trait Scalar:
    Float + NumAssign + FromPrimitive + Default + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Dense row-major array.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<F = f32> {
    shape: Vec<usize>,
    data: Vec<F>,
}

impl<F: Scalar> Tensor<F> {
    pub fn new(shape: Vec<usize>, data: Vec<F>) -> Result<Self> {
        if shape.contains(&0) {
            return Err(Error::shape(format!("zero-sized dimension in {shape:?}")));
        }
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::shape(format!(
                "shape {shape:?} needs {n} elements, got {}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        Self::filled(shape, F::zero())
    }

    pub fn filled(shape: &[usize], value: F) -> Self {
        assert!(
            shape.iter().all(|&d| d > 0),
            "zero-sized dimension in {shape:?}"
        );
        let n = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![value; n],
        }
    }

    pub fn vector(data: Vec<F>) -> Result<Self> {
        let n = data.len();
        Self::new(vec![n], data)
    }

    pub fn matrix(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        Self::new(vec![rows, cols], data)
    }

    /// Uniform in `[-bound, bound]`.
    pub fn uniform<R: Rng>(shape: &[usize], bound: f64, rng: &mut R) -> Self {
        let mut t = Self::zeros(shape);
        for v in &mut t.data {
            *v = F::of(rng.gen_range(-bound..=bound));
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [F] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<F> {
        self.data
    }

    /// Row count of a matrix (first dimension).
    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    /// Column count of a matrix (product of trailing dimensions).
    pub fn cols(&self) -> usize {
        self.shape[1..].iter().product()
    }

    pub fn row(&self, i: usize) -> &[F] {
        let c = self.cols();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [F] {
        let c = self.cols();
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn get2(&self, i: usize, j: usize) -> F {
        self.data[i * self.cols() + j]
    }

    pub fn set2(&mut self, i: usize, j: usize, v: F) {
        let c = self.cols();
        self.data[i * c + j] = v;
    }

    pub fn fill(&mut self, v: F) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Squared L2 norm accumulated in `f64`.
    pub fn sq_norm(&self) -> f64 {
        self.data.iter().map(|x| x.as_f64() * x.as_f64()).sum()
    }

    pub fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.shape, other.shape);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: F, other: &Self) {
        debug_assert_eq!(self.shape, other.shape);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: F) {
        self.data.iter_mut().for_each(|x| *x *= alpha);
    }

    /// Element type conversion (lossy when narrowing).
    pub fn cast<G: Scalar>(&self) -> Tensor<G> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| G::of(x.as_f64())).collect(),
        }
    }
}

/// Matrix product `A[m×k] · B[k×n]`.
pub fn matmul<F: Scalar>(a: &Tensor<F>, b: &Tensor<F>) -> Result<Tensor<F>> {
    if a.rank() != 2 || b.rank() != 2 {
        return Err(Error::shape(format!(
            "matmul needs matrices, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let (m, k, n) = (a.shape[0], a.shape[1], b.shape[1]);
    if b.shape[0] != k {
        return Err(Error::shape(format!(
            "matmul inner dimensions differ: {:?} x {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let mut out = vec![F::zero(); m * n];
    for i in 0..m {
        let orow = &mut out[i * n..(i + 1) * n];
        for t in 0..k {
            let av = a.data[i * k + t];
            if av == F::zero() {
                continue;
            }
            for (o, &bv) in orow.iter_mut().zip(&b.data[t * n..(t + 1) * n]) {
                *o += av * bv;
            }
        }
    }
    Tensor::new(vec![m, n], out)
}

#[inline]
pub(crate) fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    let mut s = F::zero();
    for (&x, &y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

/// `y += W · x` for `W[r×c]`.
pub(crate) fn matvec_acc<F: Scalar>(w: &Tensor<F>, x: &[F], y: &mut [F]) {
    let c = w.cols();
    debug_assert_eq!(c, x.len());
    debug_assert_eq!(w.rows(), y.len());
    for (yi, row) in y.iter_mut().zip(w.data.chunks_exact(c)) {
        *yi += dot(row, x);
    }
}

/// `y += Wᵀ · x` for `W[r×c]`.
pub(crate) fn matvec_t_acc<F: Scalar>(w: &Tensor<F>, x: &[F], y: &mut [F]) {
    let c = w.cols();
    debug_assert_eq!(w.rows(), x.len());
    debug_assert_eq!(c, y.len());
    for (&xi, row) in x.iter().zip(w.data.chunks_exact(c)) {
        if xi == F::zero() {
            continue;
        }
        for (yj, &wv) in y.iter_mut().zip(row) {
            *yj += xi * wv;
        }
    }
}

/// `W += a ⊗ b`.
pub(crate) fn outer_acc<F: Scalar>(w: &mut Tensor<F>, a: &[F], b: &[F]) {
    let c = w.cols();
    debug_assert_eq!(w.rows(), a.len());
    debug_assert_eq!(c, b.len());
    for (&ai, row) in a.iter().zip(w.data.chunks_exact_mut(c)) {
        if ai == F::zero() {
            continue;
        }
        for (r, &bv) in row.iter_mut().zip(b) {
            *r += ai * bv;
        }
    }
}

pub(crate) fn add_into<F: Scalar>(dst: &mut [F], src: &[F]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

#[inline]
pub(crate) fn sigmoid<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

pub(crate) fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::shape(format!(
            "{what}: expected length {want}, got {got}"
        )));
    }
    Ok(())
}
