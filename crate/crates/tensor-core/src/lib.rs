//! Dense multi-dimensional tensors with reverse-mode automatic differentiation.
//!
//! The library is deliberately small: row-major contiguous storage, a
//! tape-free graph built from `Rc` links between tensors, closures for the
//! backward rules, and exactly the operation set a convolutional
//! encoder/transformer stack needs. Element type is generic over [`Scalar`]
//! (`f32` for training, `f64` for finite-difference gradient checking).
//!
//! Graphs are single-threaded by construction (`Rc`, not `Arc`); independent
//! graphs may live on independent threads.

mod error;
mod scalar;
mod tensor;

pub mod checkpoint;
pub mod gradcheck;
pub mod ops;
pub mod optim;

pub use error::{Result, TensorError};
pub use scalar::{Dtype, Scalar};
pub use tensor::Tensor;
