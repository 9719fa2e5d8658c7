use crate::error::{Result, TensorError};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

impl<S: Scalar> Tensor<S> {
    /// Row gather from an embedding table [V, D] -> [ids.len(), D].
    pub fn embedding(&self, ids: &[usize]) -> Result<Tensor<S>> {
        if self.ndim() != 2 {
            return Err(TensorError::dim("embedding", self.shape(), &[]));
        }
        let (v, d) = (self.shape()[0], self.shape()[1]);
        if let Some(&bad) = ids.iter().find(|&&i| i >= v) {
            return Err(TensorError::Usage(format!(
                "embedding index {bad} out of range for table of {v} rows"
            )));
        }
        let xd = self.data();
        let mut out = Vec::with_capacity(ids.len() * d);
        for &i in ids {
            out.extend_from_slice(&xd[i * d..(i + 1) * d]);
        }
        drop(xd);
        let pa = self.clone();
        let ids_c = ids.to_vec();
        Ok(Tensor::from_op(
            out,
            vec![ids_c.len(), d],
            vec![self.clone()],
            move |_, g| {
                pa.with_grad(|ga| {
                    for (r, &i) in ids_c.iter().enumerate() {
                        for j in 0..d {
                            ga[i * d + j] += g[r * d + j];
                        }
                    }
                });
            },
        ))
    }
}
