//! Hand-computed and brute-force oracles for the forward values of each op.

use tensor_core::Tensor;

fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        assert!(
            (g - w).abs() <= tol,
            "element {i}: got {g}, want {w} (tol {tol})"
        );
    }
}

#[test]
fn matmul_identity_is_passthrough() {
    let eye = Tensor::from_vec(vec![1.0, 0.0, 0.0, 1.0], &[2, 2]).unwrap();
    let x = Tensor::from_vec(vec![3.0, -1.0, 2.5, 7.0], &[2, 2]).unwrap();
    let y = eye.matmul(&x).unwrap();
    assert_eq!(y.to_vec(), x.to_vec());
}

#[test]
fn matmul_hand_product() {
    let a = Tensor::from_vec(vec![1.0, 2.0, 3.0, 4.0], &[2, 2]).unwrap();
    let b = Tensor::from_vec(vec![5.0, 6.0, 7.0, 8.0], &[2, 2]).unwrap();
    let c = a.matmul(&b).unwrap();
    assert_eq!(c.to_vec(), vec![19.0, 22.0, 43.0, 50.0]);
}

#[test]
fn matmul_grad_of_sum_is_ones_times_b_transposed() {
    let a = Tensor::from_vec(vec![0.3, -0.2, 0.9, 1.4, 0.0, -2.0], &[2, 3])
        .unwrap()
        .requires_grad();
    let b = Tensor::from_vec(vec![2.0, -1.0, 0.5, 4.0, 1.0, 3.0], &[3, 2]).unwrap();
    a.matmul(&b).unwrap().sum().backward().unwrap();
    // d sum(A.B) / dA = ones(2x2) . B^T
    let bt = [[2.0, 0.5, 1.0], [-1.0, 4.0, 3.0]];
    let want: Vec<f64> = (0..2)
        .flat_map(|_| (0..3).map(move |k| bt[0][k] + bt[1][k]))
        .collect();
    assert_close(&a.grad().unwrap(), &want, 1e-12);
}

#[test]
fn matmul_rejects_inner_mismatch() {
    let a = Tensor::<f64>::zeros(&[2, 3]);
    let b = Tensor::<f64>::zeros(&[2, 2]);
    let err = a.matmul(&b).unwrap_err().to_string();
    assert!(err.contains("[2, 3]") && err.contains("[2, 2]"), "{err}");
}

#[test]
fn softmax_constant_is_uniform() {
    let x = Tensor::from_vec(vec![0.7; 5], &[5]).unwrap();
    let y = x.softmax(0).unwrap();
    assert_close(&y.to_vec(), &[0.2; 5], 1e-12);
}

#[test]
fn softmax_hand_values() {
    let x = Tensor::from_vec(vec![1.0, 2.0, 3.0], &[3]).unwrap();
    let y = x.softmax(0).unwrap();
    assert_close(&y.to_vec(), &[0.09003057, 0.24472847, 0.66524096], 1e-7);
}

#[test]
fn softmax_shift_invariance() {
    let x = Tensor::from_vec(vec![0.1, -2.0, 3.5, 0.0], &[4]).unwrap();
    let y1 = x.softmax(0).unwrap();
    let y2 = x.add_scalar(17.25).softmax(0).unwrap();
    assert_close(&y1.to_vec(), &y2.to_vec(), 1e-12);
}

#[test]
fn softmax_rejects_non_finite() {
    let x = Tensor::from_vec(vec![1.0, f64::NAN], &[2]).unwrap();
    assert!(x.softmax(0).is_err());
}

#[test]
fn conv_1x1_identity_weights() {
    // identity 1x1 kernel per channel: w[c, c', 0, 0] = 1 iff c == c'
    let mut w = vec![0.0; 9];
    for c in 0..3 {
        w[c * 3 + c] = 1.0;
    }
    let w = Tensor::from_vec(w, &[3, 3, 1, 1]).unwrap();
    let x = Tensor::from_vec((0..3 * 4 * 4).map(|i| i as f64 * 0.1).collect(), &[1, 3, 4, 4])
        .unwrap();
    let y = x.conv2d(&w, None, 1, 0, 1).unwrap();
    assert_eq!(y.to_vec(), x.to_vec());
}

#[test]
fn conv_3x3_averaging_on_constant_image() {
    let w = Tensor::from_vec(vec![1.0f64 / 9.0; 9], &[1, 1, 3, 3]).unwrap();
    let x = Tensor::from_vec(vec![2.0f64; 25], &[1, 1, 5, 5]).unwrap();
    let y = x.conv2d(&w, None, 1, 1, 1).unwrap();
    let yd = y.to_vec();
    // interior keeps the constant; zero padding attenuates the border
    assert!((yd[2 * 5 + 2] - 2.0).abs() < 1e-12);
    assert!((yd[0] - 2.0 * 4.0 / 9.0).abs() < 1e-12); // corner sees 4 of 9 taps
    assert!((yd[2] - 2.0 * 6.0 / 9.0).abs() < 1e-12); // edge sees 6 of 9 taps
}

/// Direct-summation convolution for the oracle comparison.
#[allow(clippy::too_many_arguments)]
fn conv_naive(
    x: &[f64],
    (b, cin, h, w): (usize, usize, usize, usize),
    wt: &[f64],
    (cout, kh, kw): (usize, usize, usize),
    bias: Option<&[f64]>,
    stride: usize,
    pad: usize,
    groups: usize,
) -> Vec<f64> {
    let oh = (h + 2 * pad - kh) / stride + 1;
    let ow = (w + 2 * pad - kw) / stride + 1;
    let cpg_in = cin / groups;
    let cpg_out = cout / groups;
    let mut out = vec![0.0; b * cout * oh * ow];
    for bi in 0..b {
        for co in 0..cout {
            let g = co / cpg_out;
            for oi in 0..oh {
                for oj in 0..ow {
                    let mut acc = bias.map(|bv| bv[co]).unwrap_or(0.0);
                    for ci in 0..cpg_in {
                        let c_in = g * cpg_in + ci;
                        for ki in 0..kh {
                            for kj in 0..kw {
                                let ii = (oi * stride + ki) as isize - pad as isize;
                                let jj = (oj * stride + kj) as isize - pad as isize;
                                if ii >= 0 && jj >= 0 && (ii as usize) < h && (jj as usize) < w {
                                    let xv = x[((bi * cin + c_in) * h + ii as usize) * w
                                        + jj as usize];
                                    let wv = wt[((co * cpg_in + ci) * kh + ki) * kw + kj];
                                    acc += xv * wv;
                                }
                            }
                        }
                    }
                    out[((bi * cout + co) * oh + oi) * ow + oj] = acc;
                }
            }
        }
    }
    out
}

#[test]
fn conv_matches_direct_summation_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for (stride, pad, groups, cin, cout, k) in [
        (1, 0, 1, 2, 3, 2),
        (2, 1, 1, 3, 2, 3),
        (1, 1, 2, 4, 4, 3),
        (1, 0, 4, 4, 8, 1),
    ] {
        let (b, h, w) = (2, 5, 6);
        let x: Vec<f64> = (0..b * cin * h * w).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let wt: Vec<f64> = (0..cout * (cin / groups) * k * k)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let bias: Vec<f64> = (0..cout).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let want = conv_naive(
            &x,
            (b, cin, h, w),
            &wt,
            (cout, k, k),
            Some(&bias),
            stride,
            pad,
            groups,
        );
        let xt = Tensor::from_vec(x, &[b, cin, h, w]).unwrap();
        let wtt = Tensor::from_vec(wt, &[cout, cin / groups, k, k]).unwrap();
        let bt = Tensor::from_vec(bias, &[cout]).unwrap();
        let got = xt.conv2d(&wtt, Some(&bt), stride, pad, groups).unwrap();
        assert_close(&got.to_vec(), &want, 1e-6);
    }
}

#[test]
fn conv_rejects_group_divisibility_violation() {
    let x = Tensor::<f64>::zeros(&[1, 3, 4, 4]);
    let w = Tensor::<f64>::zeros(&[2, 1, 1, 1]);
    assert!(x.conv2d(&w, None, 1, 0, 2).is_err());
}

#[test]
fn conv_rejects_kernel_larger_than_padded_input() {
    let x = Tensor::<f64>::zeros(&[1, 1, 2, 2]);
    let w = Tensor::<f64>::zeros(&[1, 1, 5, 5]);
    assert!(x.conv2d(&w, None, 1, 0, 1).is_err());
}

/// Scalar reference for align-corners-false bilinear interpolation.
fn bilinear_scalar(src: &[f64], h: usize, w: usize, oi: usize, oj: usize, oh: usize, ow: usize) -> f64 {
    let map = |i: usize, n_in: usize, n_out: usize| -> (usize, usize, f64) {
        let s = ((i as f64 + 0.5) * n_in as f64 / n_out as f64 - 0.5).max(0.0);
        let i0 = (s.floor() as usize).min(n_in - 1);
        (i0, (i0 + 1).min(n_in - 1), s - i0 as f64)
    };
    let (i0, i1, ti) = map(oi, h, oh);
    let (j0, j1, tj) = map(oj, w, ow);
    let top = src[i0 * w + j0] * (1.0 - tj) + src[i0 * w + j1] * tj;
    let bot = src[i1 * w + j0] * (1.0 - tj) + src[i1 * w + j1] * tj;
    top * (1.0 - ti) + bot * ti
}

#[test]
fn resize_same_size_is_identity() {
    let x = Tensor::from_vec((0..12).map(|i| i as f64).collect(), &[1, 1, 3, 4]).unwrap();
    let y = x.bilinear_resize(3, 4).unwrap();
    assert_eq!(y.to_vec(), x.to_vec());
}

#[test]
fn resize_preserves_constants() {
    let x = Tensor::from_vec(vec![0.37; 2 * 3 * 4], &[1, 2, 3, 4]).unwrap();
    for (oh, ow) in [(1, 1), (5, 7), (9, 2)] {
        let y = x.bilinear_resize(oh, ow).unwrap();
        assert_close(&y.to_vec(), &vec![0.37; 2 * oh * ow], 1e-12);
    }
}

#[test]
fn resize_2x2_to_4x4_matches_scalar_oracle() {
    let src = vec![0.0, 1.0, 2.0, 3.0];
    let x = Tensor::from_vec(src.clone(), &[1, 1, 2, 2]).unwrap();
    let y = x.bilinear_resize(4, 4).unwrap();
    let got = y.to_vec();
    for oi in 0..4 {
        for oj in 0..4 {
            let want = bilinear_scalar(&src, 2, 2, oi, oj, 4, 4);
            assert!((got[oi * 4 + oj] - want).abs() < 1e-12);
        }
    }
}

#[test]
fn resize_rejects_zero_extent() {
    let x = Tensor::<f64>::zeros(&[1, 1, 2, 2]);
    assert!(x.bilinear_resize(0, 3).is_err());
}

#[test]
fn backward_of_sum_is_ones() {
    let x = Tensor::from_vec(vec![1.0, -2.0, 5.0], &[3]).unwrap().requires_grad();
    x.sum().backward().unwrap();
    assert_eq!(x.grad().unwrap(), vec![1.0, 1.0, 1.0]);
}

#[test]
fn backward_of_sum_of_squares_is_2x() {
    let x = Tensor::from_vec(vec![1.0, -2.0, 5.0], &[3]).unwrap().requires_grad();
    x.mul(&x).unwrap().sum().backward().unwrap();
    assert_eq!(x.grad().unwrap(), vec![2.0, -4.0, 10.0]);
}

#[test]
fn backward_rejects_non_scalar_loss() {
    let x = Tensor::from_vec(vec![1.0, 2.0], &[2]).unwrap().requires_grad();
    assert!(x.backward().is_err());
}

#[test]
fn backward_accumulates_across_calls() {
    let x = Tensor::from_vec(vec![3.0], &[1]).unwrap().requires_grad();
    let loss = x.sum();
    loss.backward().unwrap();
    let loss2 = x.mul_scalar(2.0).sum();
    loss2.backward().unwrap();
    assert_eq!(x.grad().unwrap(), vec![3.0]);
}

#[test]
fn embedding_gathers_rows_and_scatters_grads() {
    let table = Tensor::from_vec(vec![0.0, 1.0, 10.0, 11.0, 20.0, 21.0], &[3, 2])
        .unwrap()
        .requires_grad();
    let out = table.embedding(&[2, 0, 2]).unwrap();
    assert_eq!(out.to_vec(), vec![20.0, 21.0, 0.0, 1.0, 20.0, 21.0]);
    out.sum().backward().unwrap();
    assert_eq!(table.grad().unwrap(), vec![1.0, 1.0, 0.0, 0.0, 2.0, 2.0]);
    assert!(table.embedding(&[3]).is_err());
}

#[test]
fn layer_norm_normalizes_rows() {
    let x = Tensor::from_vec(vec![1.0, 2.0, 3.0, 4.0, -1.0, 0.0, 1.0, 2.0], &[2, 4]).unwrap();
    let gamma = Tensor::ones(&[4]);
    let beta = Tensor::zeros(&[4]);
    let y = x.layer_norm(&gamma, &beta, 1e-9).unwrap();
    let yd = y.to_vec();
    for r in 0..2 {
        let row = &yd[r * 4..(r + 1) * 4];
        let mean: f64 = row.iter().sum::<f64>() / 4.0;
        let var: f64 = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-9);
        assert!((var - 1.0).abs() < 1e-6);
    }
}

#[test]
fn expand_broadcasts_and_sums_grad() {
    let x = Tensor::from_vec(vec![1.0, 2.0], &[2, 1]).unwrap().requires_grad();
    let y = x.expand(&[3, 2, 4]).unwrap();
    assert_eq!(y.shape(), &[3, 2, 4]);
    y.sum().backward().unwrap();
    assert_eq!(x.grad().unwrap(), vec![12.0, 12.0]);
}

#[test]
fn narrow_and_concat_are_inverse() {
    let x = Tensor::from_vec((0..24).map(|i| i as f64).collect(), &[2, 3, 4]).unwrap();
    let a = x.narrow(1, 0, 1).unwrap();
    let b = x.narrow(1, 1, 2).unwrap();
    let y = Tensor::concat(&[&a, &b], 1).unwrap();
    assert_eq!(y.to_vec(), x.to_vec());
}

#[test]
fn permute_roundtrip() {
    let x = Tensor::from_vec((0..24).map(|i| i as f64).collect(), &[2, 3, 4]).unwrap();
    let y = x.permute(&[2, 0, 1]).unwrap();
    assert_eq!(y.shape(), &[4, 2, 3]);
    let z = y.permute(&[1, 2, 0]).unwrap();
    assert_eq!(z.to_vec(), x.to_vec());
}
