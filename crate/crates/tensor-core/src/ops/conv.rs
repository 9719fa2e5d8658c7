use crate::error::{Result, TensorError};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

#[derive(Clone, Copy)]
struct ConvGeom {
    cin: usize,
    h: usize,
    w: usize,
    kh: usize,
    kw: usize,
    stride: usize,
    padding: usize,
    oh: usize,
    ow: usize,
}

/// Unpacks one image [Cin, H, W] into columns [Cin*kh*kw, OH*OW].
fn im2col<S: Scalar>(x: &[S], g: ConvGeom, col: &mut [S]) {
    let (oh, ow) = (g.oh, g.ow);
    let mut row = 0usize;
    for c in 0..g.cin {
        let plane = &x[c * g.h * g.w..(c + 1) * g.h * g.w];
        for ki in 0..g.kh {
            for kj in 0..g.kw {
                let dst = &mut col[row * oh * ow..(row + 1) * oh * ow];
                for oi in 0..oh {
                    let ii = (oi * g.stride + ki) as isize - g.padding as isize;
                    let out_base = oi * ow;
                    if ii < 0 || ii >= g.h as isize {
                        dst[out_base..out_base + ow].iter_mut().for_each(|v| *v = S::ZERO);
                        continue;
                    }
                    let in_base = ii as usize * g.w;
                    for oj in 0..ow {
                        let jj = (oj * g.stride + kj) as isize - g.padding as isize;
                        dst[out_base + oj] = if jj < 0 || jj >= g.w as isize {
                            S::ZERO
                        } else {
                            plane[in_base + jj as usize]
                        };
                    }
                }
                row += 1;
            }
        }
    }
}

/// Transpose of [`im2col`]: scatter-adds columns back into the image grad.
fn col2im_add<S: Scalar>(col: &[S], g: ConvGeom, dx: &mut [S]) {
    let (oh, ow) = (g.oh, g.ow);
    let mut row = 0usize;
    for c in 0..g.cin {
        let plane_base = c * g.h * g.w;
        for ki in 0..g.kh {
            for kj in 0..g.kw {
                let src = &col[row * oh * ow..(row + 1) * oh * ow];
                for oi in 0..oh {
                    let ii = (oi * g.stride + ki) as isize - g.padding as isize;
                    if ii < 0 || ii >= g.h as isize {
                        continue;
                    }
                    let in_base = plane_base + ii as usize * g.w;
                    let out_base = oi * ow;
                    for oj in 0..ow {
                        let jj = (oj * g.stride + kj) as isize - g.padding as isize;
                        if jj >= 0 && jj < g.w as isize {
                            dx[in_base + jj as usize] += src[out_base + oj];
                        }
                    }
                }
                row += 1;
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
unsafe fn gemm_rm<S: Scalar>(
    m: usize,
    k: usize,
    n: usize,
    a: *const S,
    a_trans: bool,
    b: *const S,
    b_trans: bool,
    beta: S,
    c: *mut S,
) {
    let (rsa, csa) = if a_trans { (1, m as isize) } else { (k as isize, 1) };
    let (rsb, csb) = if b_trans { (1, k as isize) } else { (n as isize, 1) };
    S::gemm(m, k, n, S::ONE, a, rsa, csa, b, rsb, csb, beta, c, n as isize, 1);
}

impl<S: Scalar> Tensor<S> {
    /// 2-D cross-correlation: x [B, Cin, H, W] with w [Cout, Cin/g, kh, kw],
    /// optional per-channel bias, square stride/padding, `groups` channel
    /// groups. Output spatial extents follow the floor formula.
    pub fn conv2d(
        &self,
        weight: &Tensor<S>,
        bias: Option<&Tensor<S>>,
        stride: usize,
        padding: usize,
        groups: usize,
    ) -> Result<Tensor<S>> {
        if self.ndim() != 4 || weight.ndim() != 4 {
            return Err(TensorError::dim("conv2d", self.shape(), weight.shape()));
        }
        let (b, cin, h, w) = (
            self.shape()[0],
            self.shape()[1],
            self.shape()[2],
            self.shape()[3],
        );
        let (cout, wc, kh, kw) = (
            weight.shape()[0],
            weight.shape()[1],
            weight.shape()[2],
            weight.shape()[3],
        );
        if groups == 0 || stride == 0 {
            return Err(TensorError::Config(format!(
                "conv2d stride {stride} / groups {groups} must be >= 1"
            )));
        }
        if cin % groups != 0 || cout % groups != 0 || wc != cin / groups {
            return Err(TensorError::dim("conv2d", self.shape(), weight.shape()));
        }
        if h + 2 * padding < kh || w + 2 * padding < kw {
            return Err(TensorError::dim("conv2d", self.shape(), weight.shape()));
        }
        if let Some(bt) = bias {
            if bt.shape() != [cout] {
                return Err(TensorError::dim("conv2d", bt.shape(), &[cout]));
            }
        }
        let oh = (h + 2 * padding - kh) / stride + 1;
        let ow = (w + 2 * padding - kw) / stride + 1;
        let geom = ConvGeom {
            cin,
            h,
            w,
            kh,
            kw,
            stride,
            padding,
            oh,
            ow,
        };
        let cpg_in = cin / groups; // channels per group, input side
        let cpg_out = cout / groups;
        let krows = cpg_in * kh * kw;

        let mut out = vec![S::ZERO; b * cout * oh * ow];
        {
            let xd = self.data();
            let wd = weight.data();
            let mut col = vec![S::ZERO; cin * kh * kw * oh * ow];
            for bi in 0..b {
                im2col(&xd[bi * cin * h * w..], geom, &mut col);
                for gi in 0..groups {
                    unsafe {
                        gemm_rm(
                            cpg_out,
                            krows,
                            oh * ow,
                            wd[gi * cpg_out * krows..].as_ptr(),
                            false,
                            col[gi * krows * oh * ow..].as_ptr(),
                            false,
                            S::ZERO,
                            out[(bi * cout + gi * cpg_out) * oh * ow..].as_mut_ptr(),
                        );
                    }
                }
            }
            if let Some(bt) = bias {
                let bd = bt.data();
                for bi in 0..b {
                    for c in 0..cout {
                        let base = (bi * cout + c) * oh * ow;
                        let bv = bd[c];
                        for v in &mut out[base..base + oh * ow] {
                            *v += bv;
                        }
                    }
                }
            }
        }

        let px = self.clone();
        let pw = weight.clone();
        let pbias = bias.cloned();
        let mut parents = vec![self.clone(), weight.clone()];
        if let Some(bt) = bias {
            parents.push(bt.clone());
        }
        Ok(Tensor::from_op(
            out,
            vec![b, cout, oh, ow],
            parents,
            move |_, g| {
                if pw.is_requires_grad() {
                    let xd = px.data();
                    let mut col = vec![S::ZERO; cin * kh * kw * oh * ow];
                    pw.with_grad(|gw| {
                        for bi in 0..b {
                            im2col(&xd[bi * cin * h * w..], geom, &mut col);
                            for gi in 0..groups {
                                let gout = &g[(bi * cout + gi * cpg_out) * oh * ow..];
                                unsafe {
                                    // dW += g . col^T
                                    gemm_rm(
                                        cpg_out,
                                        oh * ow,
                                        krows,
                                        gout.as_ptr(),
                                        false,
                                        col[gi * krows * oh * ow..].as_ptr(),
                                        true,
                                        S::ONE,
                                        gw[gi * cpg_out * krows..].as_mut_ptr(),
                                    );
                                }
                            }
                        }
                    });
                }
                if px.is_requires_grad() {
                    let wd = pw.data();
                    let mut dcol = vec![S::ZERO; cin * kh * kw * oh * ow];
                    px.with_grad(|gx| {
                        for bi in 0..b {
                            for gi in 0..groups {
                                let gout = &g[(bi * cout + gi * cpg_out) * oh * ow..];
                                unsafe {
                                    // dcol = W^T . g
                                    gemm_rm(
                                        krows,
                                        cpg_out,
                                        oh * ow,
                                        wd[gi * cpg_out * krows..].as_ptr(),
                                        true,
                                        gout.as_ptr(),
                                        false,
                                        S::ZERO,
                                        dcol[gi * krows * oh * ow..].as_mut_ptr(),
                                    );
                                }
                            }
                            col2im_add(&dcol, geom, &mut gx[bi * cin * h * w..]);
                        }
                    });
                }
                if let Some(bt) = &pbias {
                    if bt.is_requires_grad() {
                        bt.with_grad(|gb| {
                            for bi in 0..b {
                                for c in 0..cout {
                                    let base = (bi * cout + c) * oh * ow;
                                    let mut acc = S::ZERO;
                                    for v in &g[base..base + oh * ow] {
                                        acc += *v;
                                    }
                                    gb[c] += acc;
                                }
                            }
                        });
                    }
                }
            },
        ))
    }
}
