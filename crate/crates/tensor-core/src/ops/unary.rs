use crate::scalar::Scalar;
use crate::tensor::Tensor;

impl<S: Scalar> Tensor<S> {
    pub fn relu(&self) -> Tensor<S> {
        let data: Vec<S> = self
            .data()
            .iter()
            .map(|a| if *a > S::ZERO { *a } else { S::ZERO })
            .collect();
        let pa = self.clone();
        Tensor::from_op(data, self.shape().to_vec(), vec![self.clone()], move |_, g| {
            let xd = pa.data().clone();
            pa.with_grad(|ga| {
                for i in 0..g.len() {
                    if xd[i] > S::ZERO {
                        ga[i] += g[i];
                    }
                }
            });
        })
    }

    pub fn sigmoid(&self) -> Tensor<S> {
        let data: Vec<S> = self
            .data()
            .iter()
            .map(|a| {
                // split by sign to avoid overflow in exp
                if *a >= S::ZERO {
                    S::ONE / (S::ONE + (-*a).exp())
                } else {
                    let e = a.exp();
                    e / (S::ONE + e)
                }
            })
            .collect();
        let pa = self.clone();
        Tensor::from_op(data, self.shape().to_vec(), vec![self.clone()], move |y, g| {
            pa.with_grad(|ga| {
                for i in 0..g.len() {
                    ga[i] += g[i] * y[i] * (S::ONE - y[i]);
                }
            });
        })
    }

    pub fn tanh(&self) -> Tensor<S> {
        let data: Vec<S> = self.data().iter().map(|a| a.tanh()).collect();
        let pa = self.clone();
        Tensor::from_op(data, self.shape().to_vec(), vec![self.clone()], move |y, g| {
            pa.with_grad(|ga| {
                for i in 0..g.len() {
                    ga[i] += g[i] * (S::ONE - y[i] * y[i]);
                }
            });
        })
    }

    pub fn exp(&self) -> Tensor<S> {
        let data: Vec<S> = self.data().iter().map(|a| a.exp()).collect();
        let pa = self.clone();
        Tensor::from_op(data, self.shape().to_vec(), vec![self.clone()], move |y, g| {
            pa.with_grad(|ga| {
                for i in 0..g.len() {
                    ga[i] += g[i] * y[i];
                }
            });
        })
    }

    /// Natural log; total on positive input, -inf/NaN otherwise.
    pub fn ln(&self) -> Tensor<S> {
        let data: Vec<S> = self.data().iter().map(|a| a.ln()).collect();
        let pa = self.clone();
        Tensor::from_op(data, self.shape().to_vec(), vec![self.clone()], move |_, g| {
            let xd = pa.data().clone();
            pa.with_grad(|ga| {
                for i in 0..g.len() {
                    ga[i] += g[i] / xd[i];
                }
            });
        })
    }

    /// Elementwise x^p for a fixed exponent.
    pub fn powf_scalar(&self, p: S) -> Tensor<S> {
        let data: Vec<S> = self.data().iter().map(|a| a.powf(p)).collect();
        let pa = self.clone();
        Tensor::from_op(data, self.shape().to_vec(), vec![self.clone()], move |_, g| {
            let xd = pa.data().clone();
            pa.with_grad(|ga| {
                for i in 0..g.len() {
                    ga[i] += g[i] * p * xd[i].powf(p - S::ONE);
                }
            });
        })
    }

    /// |x|; subgradient 0 at the origin.
    pub fn abs(&self) -> Tensor<S> {
        let data: Vec<S> = self.data().iter().map(|a| a.abs()).collect();
        let pa = self.clone();
        Tensor::from_op(data, self.shape().to_vec(), vec![self.clone()], move |_, g| {
            let xd = pa.data().clone();
            pa.with_grad(|ga| {
                for i in 0..g.len() {
                    if xd[i] > S::ZERO {
                        ga[i] += g[i];
                    } else if xd[i] < S::ZERO {
                        ga[i] -= g[i];
                    }
                }
            });
        })
    }
}
