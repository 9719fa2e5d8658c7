use crate::error::{Result, TensorError};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

fn check_same<S: Scalar>(op: &'static str, a: &Tensor<S>, b: &Tensor<S>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(TensorError::dim(op, a.shape(), b.shape()));
    }
    Ok(())
}

impl<S: Scalar> Tensor<S> {
    pub fn add(&self, rhs: &Tensor<S>) -> Result<Tensor<S>> {
        check_same("add", self, rhs)?;
        let data = self
            .data()
            .iter()
            .zip(rhs.data().iter())
            .map(|(a, b)| *a + *b)
            .collect();
        let (pa, pb) = (self.clone(), rhs.clone());
        Ok(Tensor::from_op(
            data,
            self.shape().to_vec(),
            vec![self.clone(), rhs.clone()],
            move |_, g| {
                pa.grad_add_slice(g);
                pb.grad_add_slice(g);
            },
        ))
    }

    pub fn sub(&self, rhs: &Tensor<S>) -> Result<Tensor<S>> {
        check_same("sub", self, rhs)?;
        let data = self
            .data()
            .iter()
            .zip(rhs.data().iter())
            .map(|(a, b)| *a - *b)
            .collect();
        let (pa, pb) = (self.clone(), rhs.clone());
        Ok(Tensor::from_op(
            data,
            self.shape().to_vec(),
            vec![self.clone(), rhs.clone()],
            move |_, g| {
                pa.grad_add_slice(g);
                pb.with_grad(|gb| {
                    for (gi, v) in gb.iter_mut().zip(g) {
                        *gi -= *v;
                    }
                });
            },
        ))
    }

    pub fn mul(&self, rhs: &Tensor<S>) -> Result<Tensor<S>> {
        check_same("mul", self, rhs)?;
        let data = self
            .data()
            .iter()
            .zip(rhs.data().iter())
            .map(|(a, b)| *a * *b)
            .collect();
        let (pa, pb) = (self.clone(), rhs.clone());
        Ok(Tensor::from_op(
            data,
            self.shape().to_vec(),
            vec![self.clone(), rhs.clone()],
            move |_, g| {
                {
                    let bd = pb.data();
                    pa.with_grad(|ga| {
                        for i in 0..g.len() {
                            ga[i] += g[i] * bd[i];
                        }
                    });
                }
                let ad = pa.data();
                pb.with_grad(|gb| {
                    for i in 0..g.len() {
                        gb[i] += g[i] * ad[i];
                    }
                });
            },
        ))
    }

    pub fn div(&self, rhs: &Tensor<S>) -> Result<Tensor<S>> {
        check_same("div", self, rhs)?;
        let data = self
            .data()
            .iter()
            .zip(rhs.data().iter())
            .map(|(a, b)| *a / *b)
            .collect();
        let (pa, pb) = (self.clone(), rhs.clone());
        Ok(Tensor::from_op(
            data,
            self.shape().to_vec(),
            vec![self.clone(), rhs.clone()],
            move |_, g| {
                let bd = pb.data().clone();
                pa.with_grad(|ga| {
                    for i in 0..g.len() {
                        ga[i] += g[i] / bd[i];
                    }
                });
                let ad = pa.data();
                pb.with_grad(|gb| {
                    for i in 0..g.len() {
                        gb[i] -= g[i] * ad[i] / (bd[i] * bd[i]);
                    }
                });
            },
        ))
    }

    /// Elementwise maximum; at ties the gradient flows to the left operand.
    pub fn maximum(&self, rhs: &Tensor<S>) -> Result<Tensor<S>> {
        check_same("maximum", self, rhs)?;
        let data: Vec<S> = self
            .data()
            .iter()
            .zip(rhs.data().iter())
            .map(|(a, b)| a.max_val(*b))
            .collect();
        let (pa, pb) = (self.clone(), rhs.clone());
        Ok(Tensor::from_op(
            data,
            self.shape().to_vec(),
            vec![self.clone(), rhs.clone()],
            move |_, g| {
                let ad = pa.data().clone();
                let bd = pb.data().clone();
                pa.with_grad(|ga| {
                    for i in 0..g.len() {
                        if ad[i] >= bd[i] {
                            ga[i] += g[i];
                        }
                    }
                });
                pb.with_grad(|gb| {
                    for i in 0..g.len() {
                        if ad[i] < bd[i] {
                            gb[i] += g[i];
                        }
                    }
                });
            },
        ))
    }

    /// Elementwise minimum; at ties the gradient flows to the left operand.
    pub fn minimum(&self, rhs: &Tensor<S>) -> Result<Tensor<S>> {
        check_same("minimum", self, rhs)?;
        let data: Vec<S> = self
            .data()
            .iter()
            .zip(rhs.data().iter())
            .map(|(a, b)| a.min_val(*b))
            .collect();
        let (pa, pb) = (self.clone(), rhs.clone());
        Ok(Tensor::from_op(
            data,
            self.shape().to_vec(),
            vec![self.clone(), rhs.clone()],
            move |_, g| {
                let ad = pa.data().clone();
                let bd = pb.data().clone();
                pa.with_grad(|ga| {
                    for i in 0..g.len() {
                        if ad[i] <= bd[i] {
                            ga[i] += g[i];
                        }
                    }
                });
                pb.with_grad(|gb| {
                    for i in 0..g.len() {
                        if ad[i] > bd[i] {
                            gb[i] += g[i];
                        }
                    }
                });
            },
        ))
    }

    pub fn add_scalar(&self, c: S) -> Tensor<S> {
        let data = self.data().iter().map(|a| *a + c).collect();
        let pa = self.clone();
        Tensor::from_op(data, self.shape().to_vec(), vec![self.clone()], move |_, g| {
            pa.grad_add_slice(g)
        })
    }

    pub fn mul_scalar(&self, c: S) -> Tensor<S> {
        let data = self.data().iter().map(|a| *a * c).collect();
        let pa = self.clone();
        Tensor::from_op(data, self.shape().to_vec(), vec![self.clone()], move |_, g| {
            pa.with_grad(|ga| {
                for i in 0..g.len() {
                    ga[i] += g[i] * c;
                }
            })
        })
    }

    pub fn neg(&self) -> Tensor<S> {
        self.mul_scalar(-S::ONE)
    }
}
