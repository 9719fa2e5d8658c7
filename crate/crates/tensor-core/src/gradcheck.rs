//! Central finite-difference verification of analytic gradients.
//!
//! Always run in 64-bit: single precision is too coarse for reliable
//! difference quotients. The error measure is
//! |analytic - numeric| / max(1, |analytic|, |numeric|), i.e. relative with
//! an absolute floor of 1.

pub mod suite;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub coordinates_checked: usize,
    pub max_err: f64,
}

/// Checks d(loss)/d(inputs) for a scalar-valued graph builder `f`.
///
/// `f` receives one leaf tensor per entry of `inputs` (data, shape) and must
/// return a scalar. Up to `max_coords` coordinates per input are probed
/// (sampled deterministically from `seed` when an input is larger).
pub fn check_gradients<F>(
    f: F,
    inputs: &[(Vec<f64>, Vec<usize>)],
    eps: f64,
    max_coords: usize,
    seed: u64,
) -> Result<CheckReport>
where
    F: Fn(&[Tensor<f64>]) -> Result<Tensor<f64>>,
{
    // analytic pass
    let leaves: Vec<Tensor<f64>> = inputs
        .iter()
        .map(|(data, shape)| {
            Tensor::from_vec(data.clone(), shape)
                .map(|t| t.requires_grad())
        })
        .collect::<Result<_>>()?;
    let loss = f(&leaves)?;
    loss.backward()?;
    let analytic: Vec<Vec<f64>> = leaves
        .iter()
        .map(|l| l.grad().unwrap_or_else(|| vec![0.0; l.numel()]))
        .collect();

    let eval = |probe: &[(Vec<f64>, Vec<usize>)]| -> Result<f64> {
        let fresh: Vec<Tensor<f64>> = probe
            .iter()
            .map(|(d, s)| Tensor::from_vec(d.clone(), s))
            .collect::<Result<_>>()?;
        Ok(f(&fresh)?.item())
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    let mut checked = 0usize;
    for (ii, (data, _)) in inputs.iter().enumerate() {
        let mut coords: Vec<usize> = (0..data.len()).collect();
        if coords.len() > max_coords {
            coords.shuffle(&mut rng);
            coords.truncate(max_coords);
        }
        for &ci in &coords {
            let mut probe: Vec<(Vec<f64>, Vec<usize>)> = inputs.to_vec();
            probe[ii].0[ci] = data[ci] + eps;
            let plus = eval(&probe)?;
            probe[ii].0[ci] = data[ci] - eps;
            let minus = eval(&probe)?;
            let numeric = (plus - minus) / (2.0 * eps);
            let a = analytic[ii][ci];
            let err = (a - numeric).abs() / 1.0f64.max(a.abs()).max(numeric.abs());
            if err > max_err {
                max_err = err;
            }
            checked += 1;
        }
    }
    Ok(CheckReport {
        coordinates_checked: checked,
        max_err,
    })
}
