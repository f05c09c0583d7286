//! Tensors and layers with exact analytic gradients.
//!
//! Every parameterised layer comes as a plain params struct plus a `*_cell`
//! forward function returning a step record, and a `*_backward` function that
//! consumes the record. Gradients accumulate into a buffer of the same params
//! type (the "tape"), created with [`ParamSet::zeros_like`].

mod gradcheck;
mod gru;
mod linear;
mod loss;
mod lstm;
mod optim;
mod params;
mod tensor;

pub use gradcheck::{check_layer, grad_check, rel_err, LayerCheck};
pub use gru::{gru_cell, gru_cell_backward, GruParams, GruStep};
pub use linear::{linear_backward, linear_forward, LinearParams};
pub use loss::{log_softmax, softmax_xent};
pub use lstm::{lstm_cell, lstm_cell_backward, LstmParams, LstmStep};
pub use optim::{clip_and_step, sgd_step, StepStats};
pub use params::ParamSet;
pub use tensor::{matmul, Scalar, Tensor};

pub(crate) use gru::gru_backward_impl;
pub(crate) use lstm::lstm_backward_impl;
pub(crate) use tensor::{add_into, check_len, matvec_acc, matvec_t_acc, outer_acc, sigmoid};
