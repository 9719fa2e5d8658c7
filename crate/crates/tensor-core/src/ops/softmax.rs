use crate::error::{Result, TensorError};
use crate::ops::strides;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

impl<S: Scalar> Tensor<S> {
    /// Softmax along `axis`, stabilized by max subtraction. Slices along the
    /// axis sum to 1; rejects non-finite input.
    pub fn softmax(&self, axis: usize) -> Result<Tensor<S>> {
        if axis >= self.ndim() {
            return Err(TensorError::Usage(format!(
                "softmax axis {} out of range for shape {:?}",
                axis,
                self.shape()
            )));
        }
        let shape = self.shape().to_vec();
        let st = strides(&shape);
        let n = shape[axis];
        let step = st[axis];
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();

        let xd = self.data();
        if !xd.iter().all(|v| v.is_finite()) {
            return Err(TensorError::Numeric("softmax on non-finite input".into()));
        }
        let mut out = vec![S::ZERO; xd.len()];
        for o in 0..outer {
            for i in 0..inner {
                let start = o * n * inner + i;
                let mut mx = xd[start];
                for j in 1..n {
                    mx = mx.max_val(xd[start + j * step]);
                }
                let mut sum = S::ZERO;
                for j in 0..n {
                    let e = (xd[start + j * step] - mx).exp();
                    out[start + j * step] = e;
                    sum += e;
                }
                for j in 0..n {
                    out[start + j * step] /= sum;
                }
            }
        }
        drop(xd);

        let pa = self.clone();
        Ok(Tensor::from_op(
            out,
            shape,
            vec![self.clone()],
            move |y, g| {
                // dx = y * (g - sum(g * y)) along the axis
                pa.with_grad(|ga| {
                    for o in 0..outer {
                        for i in 0..inner {
                            let start = o * n * inner + i;
                            let mut dot = S::ZERO;
                            for j in 0..n {
                                let idx = start + j * step;
                                dot += g[idx] * y[idx];
                            }
                            for j in 0..n {
                                let idx = start + j * step;
                                ga[idx] += y[idx] * (g[idx] - dot);
                            }
                        }
                    }
                });
            },
        ))
    }
}
