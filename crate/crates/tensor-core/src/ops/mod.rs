//! Operation set: each op validates shapes, computes the forward value and
//! registers a closure implementing its vector-Jacobian product.

mod conv;
mod elementwise;
mod embedding;
mod layer_norm;
mod matmul;
mod reduce;
mod resize;
mod shape_ops;
mod softmax;
mod unary;

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}
