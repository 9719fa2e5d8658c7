//! Randomized finite-difference sweep over every differentiable operation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::check_gradients;
use crate::error::Result;
use crate::tensor::Tensor;

pub const FD_EPS: f64 = 1e-3;
pub const FD_TOL: f64 = 1e-4;

/// One op's aggregated result over all random shapes.
#[derive(Debug, Clone)]
pub struct OpReport {
    pub op: &'static str,
    pub shapes: usize,
    pub coordinates: usize,
    pub max_err: f64,
}

impl OpReport {
    pub fn passed(&self) -> bool {
        self.max_err < FD_TOL
    }
}

fn rand_shape<R: Rng>(rng: &mut R, max_rank: usize) -> Vec<usize> {
    let rank = rng.gen_range(1..=max_rank);
    (0..rank).map(|_| rng.gen_range(1..=5)).collect()
}

fn rand_data<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Data bounded away from zero, for ops with a kink or pole at the origin.
fn rand_data_off_zero<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let mag = rng.gen_range(0.05..1.5);
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect()
}

/// Weighted-sum scalarization so output gradients are non-uniform.
fn scalarize(out: &Tensor<f64>, weights: &[f64]) -> Result<Tensor<f64>> {
    let w = Tensor::from_vec(weights.to_vec(), out.shape())?;
    Ok(out.mul(&w)?.sum())
}

struct Case {
    inputs: Vec<(Vec<f64>, Vec<usize>)>,
    builder: Box<dyn Fn(&[Tensor<f64>]) -> Result<Tensor<f64>>>,
}

fn run_op<G>(op: &'static str, shapes: usize, seed: u64, mut gen: G) -> Result<OpReport>
where
    G: FnMut(&mut ChaCha8Rng) -> Case,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OpReport {
        op,
        shapes,
        coordinates: 0,
        max_err: 0.0,
    };
    for i in 0..shapes {
        let case = gen(&mut rng);
        let r = check_gradients(&case.builder, &case.inputs, FD_EPS, 6, seed ^ i as u64)?;
        report.coordinates += r.coordinates_checked;
        if r.max_err > report.max_err {
            report.max_err = r.max_err;
        }
    }
    Ok(report)
}

fn binary_case<R: Rng, F>(rng: &mut R, lo: f64, hi: f64, f: F) -> Case
where
    F: Fn(&Tensor<f64>, &Tensor<f64>) -> Result<Tensor<f64>> + 'static,
{
    let shape = rand_shape(rng, 3);
    let n: usize = shape.iter().product();
    let a = rand_data(rng, n, lo, hi);
    let b = rand_data(rng, n, lo, hi);
    let w = rand_data(rng, n, -1.0, 1.0);
    Case {
        inputs: vec![(a, shape.clone()), (b, shape)],
        builder: Box::new(move |t| scalarize(&f(&t[0], &t[1])?, &w)),
    }
}

fn unary_case<R: Rng, F>(rng: &mut R, data: Vec<f64>, shape: Vec<usize>, f: F) -> Case
where
    F: Fn(&Tensor<f64>) -> Result<Tensor<f64>> + 'static,
{
    let w = rand_data(rng, data.len(), -1.0, 1.0);
    Case {
        inputs: vec![(data, shape)],
        builder: Box::new(move |t| {
            let out = f(&t[0])?;
            let w_sized = &w[..out.numel()];
            scalarize(&out, w_sized)
        }),
    }
}

/// Runs the full per-op sweep; every differentiable operation appears.
pub fn op_gradient_suite(shapes_per_op: usize, seed: u64) -> Result<Vec<OpReport>> {
    let mut reports = Vec::new();
    let mut push = |r: Result<OpReport>| -> Result<()> {
        reports.push(r?);
        Ok(())
    };

    push(run_op("add", shapes_per_op, seed, |rng| {
        binary_case(rng, -1.0, 1.0, |a, b| a.add(b))
    }))?;
    push(run_op("sub", shapes_per_op, seed + 1, |rng| {
        binary_case(rng, -1.0, 1.0, |a, b| a.sub(b))
    }))?;
    push(run_op("mul", shapes_per_op, seed + 2, |rng| {
        binary_case(rng, -1.0, 1.0, |a, b| a.mul(b))
    }))?;
    push(run_op("div", shapes_per_op, seed + 3, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let a = rand_data(rng, n, -1.0, 1.0);
        let b = rand_data_off_zero(rng, n)
            .into_iter()
            .map(|v| if v.abs() < 0.3 { v.signum() * 0.3 } else { v })
            .collect::<Vec<_>>();
        let w = rand_data(rng, n, -1.0, 1.0);
        Case {
            inputs: vec![(a, shape.clone()), (b, shape)],
            builder: Box::new(move |t| scalarize(&t[0].div(&t[1])?, &w)),
        }
    }))?;
    push(run_op("maximum", shapes_per_op, seed + 4, |rng| {
        // keep operands separated so the max has no kink at the probe
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let a = rand_data(rng, n, -1.0, 1.0);
        let b: Vec<f64> = a
            .iter()
            .map(|v| v + if rng.gen_bool(0.5) { 0.3 } else { -0.3 })
            .collect();
        let w = rand_data(rng, n, -1.0, 1.0);
        Case {
            inputs: vec![(a, shape.clone()), (b, shape)],
            builder: Box::new(move |t| scalarize(&t[0].maximum(&t[1])?, &w)),
        }
    }))?;
    push(run_op("minimum", shapes_per_op, seed + 5, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let a = rand_data(rng, n, -1.0, 1.0);
        let b: Vec<f64> = a
            .iter()
            .map(|v| v + if rng.gen_bool(0.5) { 0.3 } else { -0.3 })
            .collect();
        let w = rand_data(rng, n, -1.0, 1.0);
        Case {
            inputs: vec![(a, shape.clone()), (b, shape)],
            builder: Box::new(move |t| scalarize(&t[0].minimum(&t[1])?, &w)),
        }
    }))?;

    push(run_op("add_scalar", shapes_per_op, seed + 6, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let c: f64 = rng.gen_range(-2.0..2.0);
        let data = rand_data(rng, n, -1.0, 1.0);
        unary_case(rng, data, shape, move |x| {
            Ok(x.add_scalar(c))
        })
    }))?;
    push(run_op("mul_scalar", shapes_per_op, seed + 7, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let c: f64 = rng.gen_range(-2.0..2.0);
        let data = rand_data(rng, n, -1.0, 1.0);
        unary_case(rng, data, shape, move |x| {
            Ok(x.mul_scalar(c))
        })
    }))?;
    push(run_op("relu", shapes_per_op, seed + 8, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let data = rand_data_off_zero(rng, n);
        unary_case(rng, data, shape, |x| Ok(x.relu()))
    }))?;
    push(run_op("abs", shapes_per_op, seed + 9, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let data = rand_data_off_zero(rng, n);
        unary_case(rng, data, shape, |x| Ok(x.abs()))
    }))?;
    push(run_op("sigmoid", shapes_per_op, seed + 10, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let data = rand_data(rng, n, -2.0, 2.0);
        unary_case(rng, data, shape, |x| Ok(x.sigmoid()))
    }))?;
    push(run_op("tanh", shapes_per_op, seed + 11, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let data = rand_data(rng, n, -2.0, 2.0);
        unary_case(rng, data, shape, |x| Ok(x.tanh()))
    }))?;
    push(run_op("exp", shapes_per_op, seed + 12, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let data = rand_data(rng, n, -2.0, 2.0);
        unary_case(rng, data, shape, |x| Ok(x.exp()))
    }))?;
    push(run_op("ln", shapes_per_op, seed + 13, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let data = rand_data(rng, n, 0.2, 3.0);
        unary_case(rng, data, shape, |x| Ok(x.ln()))
    }))?;
    push(run_op("powf_scalar", shapes_per_op, seed + 14, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        let p = [0.5, 2.0, 3.0][rng.gen_range(0..3)];
        let data = rand_data(rng, n, 0.2, 2.0);
        unary_case(rng, data, shape, move |x| {
            Ok(x.powf_scalar(p))
        })
    }))?;

    push(run_op("matmul", shapes_per_op, seed + 15, |rng| {
        let (m, k, p) = (
            rng.gen_range(1..5),
            rng.gen_range(1..5),
            rng.gen_range(1..5),
        );
        // alternate between plain 2-d, batched, and broadcast-batched
        let variant = rng.gen_range(0..3);
        let (sa, sb): (Vec<usize>, Vec<usize>) = match variant {
            0 => (vec![m, k], vec![k, p]),
            1 => (vec![2, m, k], vec![2, k, p]),
            _ => (vec![3, m, k], vec![k, p]),
        };
        let na: usize = sa.iter().product();
        let nb: usize = sb.iter().product();
        let a = rand_data(rng, na, -1.0, 1.0);
        let b = rand_data(rng, nb, -1.0, 1.0);
        let out_n = if variant == 0 { m * p } else { sa[0] * m * p };
        let w = rand_data(rng, out_n, -1.0, 1.0);
        Case {
            inputs: vec![(a, sa), (b, sb)],
            builder: Box::new(move |t| scalarize(&t[0].matmul(&t[1])?, &w)),
        }
    }))?;

    push(run_op("conv2d", shapes_per_op, seed + 16, |rng| {
        let configs = [
            (1usize, 2usize, 3usize, 1usize, 1usize, 0usize, 1usize),
            (2, 1, 2, 3, 1, 1, 1),
            (1, 4, 4, 3, 2, 1, 2),
            (1, 4, 8, 1, 1, 0, 4),
            (2, 3, 2, 2, 2, 0, 1),
        ];
        let (b, cin, cout, k, stride, pad, groups) = configs[rng.gen_range(0..configs.len())];
        let (h, w) = (rng.gen_range(3..6), rng.gen_range(3..6));
        let x = rand_data(rng, b * cin * h * w, -1.0, 1.0);
        let wt = rand_data(rng, cout * (cin / groups) * k * k, -1.0, 1.0);
        let bias = rand_data(rng, cout, -0.5, 0.5);
        let oh = (h + 2 * pad - k) / stride + 1;
        let ow = (w + 2 * pad - k) / stride + 1;
        let wsum = rand_data(rng, b * cout * oh * ow, -1.0, 1.0);
        Case {
            inputs: vec![
                (x, vec![b, cin, h, w]),
                (wt, vec![cout, cin / groups, k, k]),
                (bias, vec![cout]),
            ],
            builder: Box::new(move |t| {
                scalarize(&t[0].conv2d(&t[1], Some(&t[2]), stride, pad, groups)?, &wsum)
            }),
        }
    }))?;

    push(run_op("bilinear_resize", shapes_per_op, seed + 17, |rng| {
        let (h, w) = (rng.gen_range(2..5), rng.gen_range(2..5));
        let (oh, ow) = (rng.gen_range(1..7), rng.gen_range(1..7));
        let x = rand_data(rng, 2 * h * w, -1.0, 1.0);
        let wsum = rand_data(rng, 2 * oh * ow, -1.0, 1.0);
        Case {
            inputs: vec![(x, vec![1, 2, h, w])],
            builder: Box::new(move |t| scalarize(&t[0].bilinear_resize(oh, ow)?, &wsum)),
        }
    }))?;

    push(run_op("softmax", shapes_per_op, seed + 18, |rng| {
        let shape = rand_shape(rng, 3);
        let axis = rng.gen_range(0..shape.len());
        let n: usize = shape.iter().product();
        let x = rand_data(rng, n, -2.0, 2.0);
        let w = rand_data(rng, n, -1.0, 1.0);
        Case {
            inputs: vec![(x, shape)],
            builder: Box::new(move |t| scalarize(&t[0].softmax(axis)?, &w)),
        }
    }))?;

    push(run_op("layer_norm", shapes_per_op, seed + 19, |rng| {
        let rows = rng.gen_range(1..4);
        let d = rng.gen_range(2..6);
        // a ramp keeps row variance well away from zero; finite differences
        // are unreliable when the normalizer itself is near-singular
        let x: Vec<f64> = rand_data(rng, rows * d, -0.3, 0.3)
            .into_iter()
            .enumerate()
            .map(|(i, v)| v + (i % d) as f64)
            .collect();
        let gamma = rand_data(rng, d, 0.5, 1.5);
        let beta = rand_data(rng, d, -0.5, 0.5);
        let w = rand_data(rng, rows * d, -1.0, 1.0);
        Case {
            inputs: vec![(x, vec![rows, d]), (gamma, vec![d]), (beta, vec![d])],
            builder: Box::new(move |t| {
                scalarize(&t[0].layer_norm(&t[1], &t[2], 1e-5)?, &w)
            }),
        }
    }))?;

    push(run_op("sum", shapes_per_op, seed + 20, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        Case {
            inputs: vec![(rand_data(rng, n, -1.0, 1.0), shape)],
            builder: Box::new(|t| Ok(t[0].sum())),
        }
    }))?;
    push(run_op("mean", shapes_per_op, seed + 21, |rng| {
        let shape = rand_shape(rng, 3);
        let n: usize = shape.iter().product();
        Case {
            inputs: vec![(rand_data(rng, n, -1.0, 1.0), shape)],
            builder: Box::new(|t| Ok(t[0].mean())),
        }
    }))?;
    push(run_op("sum_axis", shapes_per_op, seed + 22, |rng| {
        let shape = rand_shape(rng, 3);
        let axis = rng.gen_range(0..shape.len());
        let n: usize = shape.iter().product();
        let out_n = n / shape[axis];
        let x = rand_data(rng, n, -1.0, 1.0);
        let w = rand_data(rng, out_n, -1.0, 1.0);
        Case {
            inputs: vec![(x, shape)],
            builder: Box::new(move |t| scalarize(&t[0].sum_axis(axis)?, &w)),
        }
    }))?;
    push(run_op("mean_axis", shapes_per_op, seed + 23, |rng| {
        let shape = rand_shape(rng, 3);
        let axis = rng.gen_range(0..shape.len());
        let n: usize = shape.iter().product();
        let out_n = n / shape[axis];
        let x = rand_data(rng, n, -1.0, 1.0);
        let w = rand_data(rng, out_n, -1.0, 1.0);
        Case {
            inputs: vec![(x, shape)],
            builder: Box::new(move |t| scalarize(&t[0].mean_axis(axis)?, &w)),
        }
    }))?;

    push(run_op("reshape", shapes_per_op, seed + 24, |rng| {
        let (a, b) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let x = rand_data(rng, a * b, -1.0, 1.0);
        let w = rand_data(rng, a * b, -1.0, 1.0);
        Case {
            inputs: vec![(x, vec![a, b])],
            builder: Box::new(move |t| scalarize(&t[0].reshape(&[t[0].numel()])?, &w)),
        }
    }))?;
    push(run_op("permute", shapes_per_op, seed + 25, |rng| {
        let shape = vec![
            rng.gen_range(1..4),
            rng.gen_range(1..4),
            rng.gen_range(1..4),
        ];
        let mut perm = vec![0usize, 1, 2];
        for i in (1..3).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let n: usize = shape.iter().product();
        let x = rand_data(rng, n, -1.0, 1.0);
        let w = rand_data(rng, n, -1.0, 1.0);
        Case {
            inputs: vec![(x, shape)],
            builder: Box::new(move |t| scalarize(&t[0].permute(&perm)?, &w)),
        }
    }))?;
    push(run_op("narrow", shapes_per_op, seed + 26, |rng| {
        let shape = vec![rng.gen_range(2..5), rng.gen_range(2..5)];
        let axis = rng.gen_range(0..2);
        let len = rng.gen_range(1..=shape[axis]);
        let start = rng.gen_range(0..=shape[axis] - len);
        let n: usize = shape.iter().product();
        let out_n = n / shape[axis] * len;
        let x = rand_data(rng, n, -1.0, 1.0);
        let w = rand_data(rng, out_n, -1.0, 1.0);
        Case {
            inputs: vec![(x, shape)],
            builder: Box::new(move |t| scalarize(&t[0].narrow(axis, start, len)?, &w)),
        }
    }))?;
    push(run_op("concat", shapes_per_op, seed + 27, |rng| {
        let rows_a = rng.gen_range(1..4);
        let rows_b = rng.gen_range(1..4);
        let d = rng.gen_range(1..4);
        let a = rand_data(rng, rows_a * d, -1.0, 1.0);
        let b = rand_data(rng, rows_b * d, -1.0, 1.0);
        let w = rand_data(rng, (rows_a + rows_b) * d, -1.0, 1.0);
        Case {
            inputs: vec![(a, vec![rows_a, d]), (b, vec![rows_b, d])],
            builder: Box::new(move |t| scalarize(&Tensor::concat(&[&t[0], &t[1]], 0)?, &w)),
        }
    }))?;
    push(run_op("expand", shapes_per_op, seed + 28, |rng| {
        let d = rng.gen_range(1..4);
        let reps = rng.gen_range(2..5);
        let x = rand_data(rng, d, -1.0, 1.0);
        let w = rand_data(rng, reps * d, -1.0, 1.0);
        Case {
            inputs: vec![(x, vec![1, d])],
            builder: Box::new(move |t| scalarize(&t[0].expand(&[reps, d])?, &w)),
        }
    }))?;
    push(run_op("embedding", shapes_per_op, seed + 29, |rng| {
        let (v, d) = (rng.gen_range(3..6), rng.gen_range(2..4));
        let l = rng.gen_range(1..5);
        let ids: Vec<usize> = (0..l).map(|_| rng.gen_range(0..v)).collect();
        let table = rand_data(rng, v * d, -1.0, 1.0);
        let w = rand_data(rng, l * d, -1.0, 1.0);
        Case {
            inputs: vec![(table, vec![v, d])],
            builder: Box::new(move |t| scalarize(&t[0].embedding(&ids)?, &w)),
        }
    }))?;

    Ok(reports)
}
