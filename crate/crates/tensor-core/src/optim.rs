//! Decoupled-weight-decay Adam with per-group learning rates.

use crate::error::{Result, TensorError};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

struct Group<S: Scalar> {
    params: Vec<Tensor<S>>,
    lr: f64,
    m: Vec<Vec<S>>,
    v: Vec<Vec<S>>,
}

pub struct AdamW<S: Scalar> {
    groups: Vec<Group<S>>,
    beta1: f64,
    beta2: f64,
    eps: f64,
    weight_decay: f64,
    t: u64,
}

impl<S: Scalar> AdamW<S> {
    /// `groups` pairs a parameter list with its learning rate. Moment state
    /// starts at zero.
    pub fn new(
        groups: Vec<(Vec<Tensor<S>>, f64)>,
        betas: (f64, f64),
        eps: f64,
        weight_decay: f64,
    ) -> Result<Self> {
        for (_, lr) in &groups {
            if *lr <= 0.0 {
                return Err(TensorError::Config(format!(
                    "learning rate must be positive, got {lr}"
                )));
            }
        }
        let groups = groups
            .into_iter()
            .map(|(params, lr)| {
                let m = params.iter().map(|p| vec![S::ZERO; p.numel()]).collect();
                let v = params.iter().map(|p| vec![S::ZERO; p.numel()]).collect();
                Group { params, lr, m, v }
            })
            .collect();
        Ok(AdamW {
            groups,
            beta1: betas.0,
            beta2: betas.1,
            eps,
            weight_decay,
            t: 0,
        })
    }

    /// Applies one bias-corrected update to every parameter that has an
    /// accumulated gradient; parameters without a gradient are untouched.
    pub fn step(&mut self) {
        self.t += 1;
        let b1 = S::from_f64(self.beta1);
        let b2 = S::from_f64(self.beta2);
        let bc1 = S::from_f64(1.0 - self.beta1.powi(self.t as i32));
        let bc2 = S::from_f64(1.0 - self.beta2.powi(self.t as i32));
        let eps = S::from_f64(self.eps);
        let wd = S::from_f64(self.weight_decay);
        for group in &mut self.groups {
            let lr = S::from_f64(group.lr);
            for (pi, p) in group.params.iter().enumerate() {
                let Some(grad) = p.grad() else { continue };
                let m = &mut group.m[pi];
                let v = &mut group.v[pi];
                let mut data = p.data_mut();
                for i in 0..grad.len() {
                    let g = grad[i];
                    m[i] = b1 * m[i] + (S::ONE - b1) * g;
                    v[i] = b2 * v[i] + (S::ONE - b2) * g * g;
                    let m_hat = m[i] / bc1;
                    let v_hat = v[i] / bc2;
                    let theta = data[i];
                    data[i] = theta - lr * (m_hat / (v_hat.sqrt() + eps) + wd * theta);
                }
            }
        }
    }

    pub fn zero_grad(&self) {
        for group in &self.groups {
            for p in &group.params {
                p.zero_grad();
            }
        }
    }

    /// Multiplies every group's learning rate (step-decay schedules).
    pub fn scale_lr(&mut self, factor: f64) {
        for group in &mut self.groups {
            group.lr *= factor;
        }
    }

    pub fn learning_rates(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.lr).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn param(v: &[f64]) -> Tensor<f64> {
        Tensor::from_vec(v.to_vec(), &[v.len()]).unwrap().requires_grad()
    }

    #[test]
    fn rejects_nonpositive_lr() {
        let p = param(&[1.0]);
        assert!(AdamW::new(vec![(vec![p], 0.0)], (0.9, 0.999), 1e-8, 0.0).is_err());
    }

    #[test]
    fn zero_grad_zero_decay_leaves_params_unchanged() {
        let p = param(&[1.5, -2.0]);
        p.with_grad(|g| g.iter_mut().for_each(|v| *v = 0.0));
        let mut opt = AdamW::new(vec![(vec![p.clone()], 0.1)], (0.9, 0.999), 1e-8, 0.0).unwrap();
        opt.step();
        assert_eq!(p.to_vec(), vec![1.5, -2.0]);
    }

    #[test]
    fn first_step_magnitude_is_roughly_lr() {
        // constant gradient g: bias-corrected first step is lr * g/(|g| + eps')
        let p = param(&[0.0]);
        p.with_grad(|g| g[0] = 3.0);
        let mut opt = AdamW::new(vec![(vec![p.clone()], 0.01)], (0.9, 0.999), 1e-8, 0.0).unwrap();
        opt.step();
        let got = p.to_vec()[0];
        assert!((got + 0.01).abs() < 1e-6, "got {got}");
    }

    #[test]
    fn weight_decay_only_shrinks_toward_zero() {
        let p = param(&[2.0]);
        p.with_grad(|g| g[0] = 0.0);
        let mut opt = AdamW::new(vec![(vec![p.clone()], 0.1)], (0.9, 0.999), 1e-8, 0.5).unwrap();
        opt.step();
        // theta <- theta - lr * wd * theta = 2.0 * (1 - 0.05)
        assert!((p.to_vec()[0] - 1.9).abs() < 1e-12);
    }

    #[test]
    fn params_without_grad_are_skipped() {
        let p = param(&[1.0]);
        let mut opt = AdamW::new(vec![(vec![p.clone()], 0.1)], (0.9, 0.999), 1e-8, 0.9).unwrap();
        opt.step();
        assert_eq!(p.to_vec(), vec![1.0]);
    }
}
