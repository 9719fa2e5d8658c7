use crate::error::{Result, TensorError};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

impl<S: Scalar> Tensor<S> {
    /// Layer normalization over the last dimension with affine parameters:
    /// y = (x - mean) / sqrt(var + eps) * gamma + beta.
    pub fn layer_norm(&self, gamma: &Tensor<S>, beta: &Tensor<S>, eps: S) -> Result<Tensor<S>> {
        let d = *self
            .shape()
            .last()
            .ok_or_else(|| TensorError::Usage("layer_norm on 0-d tensor".into()))?;
        if gamma.shape() != [d] || beta.shape() != [d] {
            return Err(TensorError::dim("layer_norm", self.shape(), gamma.shape()));
        }
        let rows = self.numel() / d;
        let xd = self.data();
        let gd = gamma.data();
        let bd = beta.data();
        let mut out = vec![S::ZERO; xd.len()];
        let mut means = vec![S::ZERO; rows];
        let mut rstds = vec![S::ZERO; rows];
        let inv_d = S::ONE / S::from_usize(d);
        for r in 0..rows {
            let row = &xd[r * d..(r + 1) * d];
            let mean: S = row.iter().copied().sum::<S>() * inv_d;
            let var: S = row
                .iter()
                .map(|v| (*v - mean) * (*v - mean))
                .sum::<S>()
                * inv_d;
            let rstd = S::ONE / (var + eps).sqrt();
            means[r] = mean;
            rstds[r] = rstd;
            for j in 0..d {
                out[r * d + j] = (row[j] - mean) * rstd * gd[j] + bd[j];
            }
        }
        drop(xd);
        drop(gd);
        drop(bd);

        let (px, pg, pb) = (self.clone(), gamma.clone(), beta.clone());
        Ok(Tensor::from_op(
            out,
            self.shape().to_vec(),
            vec![self.clone(), gamma.clone(), beta.clone()],
            move |_, g| {
                let xd = px.data().clone();
                let gd = pg.data().clone();
                if px.is_requires_grad() {
                    px.with_grad(|gx| {
                        for r in 0..rows {
                            let (mean, rstd) = (means[r], rstds[r]);
                            // means over the row of g*gamma and g*gamma*xhat
                            let mut m1 = S::ZERO;
                            let mut m2 = S::ZERO;
                            for j in 0..d {
                                let idx = r * d + j;
                                let xhat = (xd[idx] - mean) * rstd;
                                let gg = g[idx] * gd[j];
                                m1 += gg;
                                m2 += gg * xhat;
                            }
                            m1 *= inv_d;
                            m2 *= inv_d;
                            for j in 0..d {
                                let idx = r * d + j;
                                let xhat = (xd[idx] - mean) * rstd;
                                gx[idx] += rstd * (g[idx] * gd[j] - m1 - xhat * m2);
                            }
                        }
                    });
                }
                if pg.is_requires_grad() {
                    pg.with_grad(|ggam| {
                        for r in 0..rows {
                            let (mean, rstd) = (means[r], rstds[r]);
                            for j in 0..d {
                                let idx = r * d + j;
                                ggam[j] += g[idx] * (xd[idx] - mean) * rstd;
                            }
                        }
                    });
                }
                if pb.is_requires_grad() {
                    pb.with_grad(|gbet| {
                        for r in 0..rows {
                            for j in 0..d {
                                gbet[j] += g[r * d + j];
                            }
                        }
                    });
                }
            },
        ))
    }
}
