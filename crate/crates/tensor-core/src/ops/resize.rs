use crate::error::{Result, TensorError};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// Source index/weight pair for one output coordinate (align-corners-false).
fn axis_table(n_in: usize, n_out: usize) -> Vec<(usize, usize, f64)> {
    let scale = n_in as f64 / n_out as f64;
    (0..n_out)
        .map(|i| {
            let mut src = (i as f64 + 0.5) * scale - 0.5;
            if src < 0.0 {
                src = 0.0;
            }
            let i0 = (src.floor() as usize).min(n_in - 1);
            let i1 = (i0 + 1).min(n_in - 1);
            (i0, i1, src - i0 as f64)
        })
        .collect()
}

impl<S: Scalar> Tensor<S> {
    /// Bilinear interpolation of [B, C, H, W] to (out_h, out_w), matching
    /// the align-corners-false convention. Identity when sizes are unchanged.
    pub fn bilinear_resize(&self, out_h: usize, out_w: usize) -> Result<Tensor<S>> {
        if self.ndim() != 4 {
            return Err(TensorError::dim("bilinear_resize", self.shape(), &[]));
        }
        if out_h == 0 || out_w == 0 {
            return Err(TensorError::dim(
                "bilinear_resize",
                self.shape(),
                &[out_h, out_w],
            ));
        }
        let (b, c, h, w) = (
            self.shape()[0],
            self.shape()[1],
            self.shape()[2],
            self.shape()[3],
        );
        let rows = axis_table(h, out_h);
        let cols = axis_table(w, out_w);

        let xd = self.data();
        let mut out = vec![S::ZERO; b * c * out_h * out_w];
        for plane in 0..b * c {
            let src = &xd[plane * h * w..(plane + 1) * h * w];
            let dst = &mut out[plane * out_h * out_w..(plane + 1) * out_h * out_w];
            for (oi, &(i0, i1, ti)) in rows.iter().enumerate() {
                let ti_s = S::from_f64(ti);
                for (oj, &(j0, j1, tj)) in cols.iter().enumerate() {
                    let tj_s = S::from_f64(tj);
                    let v00 = src[i0 * w + j0];
                    let v01 = src[i0 * w + j1];
                    let v10 = src[i1 * w + j0];
                    let v11 = src[i1 * w + j1];
                    let top = v00 + (v01 - v00) * tj_s;
                    let bot = v10 + (v11 - v10) * tj_s;
                    dst[oi * out_w + oj] = top + (bot - top) * ti_s;
                }
            }
        }
        drop(xd);

        let pa = self.clone();
        Ok(Tensor::from_op(
            out,
            vec![b, c, out_h, out_w],
            vec![self.clone()],
            move |_, g| {
                pa.with_grad(|ga| {
                    for plane in 0..b * c {
                        let gsrc = &g[plane * out_h * out_w..(plane + 1) * out_h * out_w];
                        let gdst = &mut ga[plane * h * w..(plane + 1) * h * w];
                        for (oi, &(i0, i1, ti)) in rows.iter().enumerate() {
                            let ti_s = S::from_f64(ti);
                            for (oj, &(j0, j1, tj)) in cols.iter().enumerate() {
                                let tj_s = S::from_f64(tj);
                                let gv = gsrc[oi * out_w + oj];
                                let w00 = (S::ONE - ti_s) * (S::ONE - tj_s);
                                let w01 = (S::ONE - ti_s) * tj_s;
                                let w10 = ti_s * (S::ONE - tj_s);
                                let w11 = ti_s * tj_s;
                                gdst[i0 * w + j0] += gv * w00;
                                gdst[i0 * w + j1] += gv * w01;
                                gdst[i1 * w + j0] += gv * w10;
                                gdst[i1 * w + j1] += gv * w11;
                            }
                        }
                    }
                });
            },
        ))
    }
}
