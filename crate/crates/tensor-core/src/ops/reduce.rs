use crate::error::{Result, TensorError};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

impl<S: Scalar> Tensor<S> {
    /// Sum of all elements, as a scalar tensor.
    pub fn sum(&self) -> Tensor<S> {
        let total: S = self.data().iter().copied().sum();
        let pa = self.clone();
        Tensor::from_op(vec![total], vec![], vec![self.clone()], move |_, g| {
            let gv = g[0];
            pa.with_grad(|ga| {
                for v in ga.iter_mut() {
                    *v += gv;
                }
            });
        })
    }

    /// Mean of all elements, as a scalar tensor.
    pub fn mean(&self) -> Tensor<S> {
        let n = self.numel().max(1);
        self.sum().mul_scalar(S::ONE / S::from_usize(n))
    }

    /// Sum along one axis; the axis is removed from the shape.
    pub fn sum_axis(&self, axis: usize) -> Result<Tensor<S>> {
        if axis >= self.ndim() {
            return Err(TensorError::Usage(format!(
                "sum_axis {} out of range for shape {:?}",
                axis,
                self.shape()
            )));
        }
        let shape = self.shape().to_vec();
        let n = shape[axis];
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let xd = self.data();
        let mut out = vec![S::ZERO; outer * inner];
        for o in 0..outer {
            for j in 0..n {
                let src = (o * n + j) * inner;
                let dst = o * inner;
                for i in 0..inner {
                    out[dst + i] += xd[src + i];
                }
            }
        }
        drop(xd);
        let mut out_shape = shape.clone();
        out_shape.remove(axis);
        let pa = self.clone();
        Ok(Tensor::from_op(
            out,
            out_shape,
            vec![self.clone()],
            move |_, g| {
                pa.with_grad(|ga| {
                    for o in 0..outer {
                        for j in 0..n {
                            let dst = (o * n + j) * inner;
                            let src = o * inner;
                            for i in 0..inner {
                                ga[dst + i] += g[src + i];
                            }
                        }
                    }
                });
            },
        ))
    }

    /// Mean along one axis; the axis is removed from the shape.
    pub fn mean_axis(&self, axis: usize) -> Result<Tensor<S>> {
        let n = self
            .shape()
            .get(axis)
            .copied()
            .ok_or_else(|| {
                TensorError::Usage(format!(
                    "mean_axis {} out of range for shape {:?}",
                    axis,
                    self.shape()
                ))
            })?
            .max(1);
        Ok(self.sum_axis(axis)?.mul_scalar(S::ONE / S::from_usize(n)))
    }
}
