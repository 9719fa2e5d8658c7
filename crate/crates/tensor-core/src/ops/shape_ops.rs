use crate::error::{Result, TensorError};
use crate::ops::strides;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

impl<S: Scalar> Tensor<S> {
    /// Same elements, new shape (element counts must agree).
    pub fn reshape(&self, new_shape: &[usize]) -> Result<Tensor<S>> {
        let new_numel: usize = new_shape.iter().product();
        if new_numel != self.numel() {
            return Err(TensorError::dim("reshape", self.shape(), new_shape));
        }
        let pa = self.clone();
        Ok(Tensor::from_op(
            self.to_vec(),
            new_shape.to_vec(),
            vec![self.clone()],
            move |_, g| pa.grad_add_slice(g),
        ))
    }

    /// Reorders axes; `perm` must be a permutation of 0..ndim.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor<S>> {
        let nd = self.ndim();
        let mut seen = vec![false; nd];
        if perm.len() != nd || perm.iter().any(|&p| p >= nd || std::mem::replace(&mut seen[p], true)) {
            return Err(TensorError::Usage(format!(
                "invalid permutation {:?} for shape {:?}",
                perm,
                self.shape()
            )));
        }
        let src_shape = self.shape().to_vec();
        let src_strides = strides(&src_shape);
        let out_shape: Vec<usize> = perm.iter().map(|&p| src_shape[p]).collect();
        let out_strides_in_src: Vec<usize> = perm.iter().map(|&p| src_strides[p]).collect();

        let xd = self.data();
        let mut out = vec![S::ZERO; xd.len()];
        let n = xd.len();
        // walk output linearly, computing the source index incrementally
        let mut idx = vec![0usize; nd];
        let mut src = 0usize;
        for item in out.iter_mut().take(n) {
            *item = xd[src];
            for d in (0..nd).rev() {
                idx[d] += 1;
                src += out_strides_in_src[d];
                if idx[d] < out_shape[d] {
                    break;
                }
                src -= out_strides_in_src[d] * out_shape[d];
                idx[d] = 0;
            }
        }
        drop(xd);

        let pa = self.clone();
        let out_shape_c = out_shape.clone();
        Ok(Tensor::from_op(
            out,
            out_shape,
            vec![self.clone()],
            move |_, g| {
                pa.with_grad(|ga| {
                    let mut idx = vec![0usize; nd];
                    let mut src = 0usize;
                    for gv in g.iter().take(n) {
                        ga[src] += *gv;
                        for d in (0..nd).rev() {
                            idx[d] += 1;
                            src += out_strides_in_src[d];
                            if idx[d] < out_shape_c[d] {
                                break;
                            }
                            src -= out_strides_in_src[d] * out_shape_c[d];
                            idx[d] = 0;
                        }
                    }
                });
            },
        ))
    }

    /// Swaps two axes.
    pub fn transpose(&self, a: usize, b: usize) -> Result<Tensor<S>> {
        let mut perm: Vec<usize> = (0..self.ndim()).collect();
        if a >= perm.len() || b >= perm.len() {
            return Err(TensorError::Usage(format!(
                "transpose axes ({a}, {b}) out of range for shape {:?}",
                self.shape()
            )));
        }
        perm.swap(a, b);
        self.permute(&perm)
    }

    /// Contiguous sub-range along `axis`.
    pub fn narrow(&self, axis: usize, start: usize, len: usize) -> Result<Tensor<S>> {
        if axis >= self.ndim() || start + len > self.shape()[axis] {
            return Err(TensorError::Usage(format!(
                "narrow(axis={axis}, start={start}, len={len}) out of range for shape {:?}",
                self.shape()
            )));
        }
        let shape = self.shape().to_vec();
        let n = shape[axis];
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let xd = self.data();
        let mut out = Vec::with_capacity(outer * len * inner);
        for o in 0..outer {
            let base = (o * n + start) * inner;
            out.extend_from_slice(&xd[base..base + len * inner]);
        }
        drop(xd);
        let mut out_shape = shape.clone();
        out_shape[axis] = len;
        let pa = self.clone();
        Ok(Tensor::from_op(
            out,
            out_shape,
            vec![self.clone()],
            move |_, g| {
                pa.with_grad(|ga| {
                    for o in 0..outer {
                        let dst = (o * n + start) * inner;
                        let src = o * len * inner;
                        for i in 0..len * inner {
                            ga[dst + i] += g[src + i];
                        }
                    }
                });
            },
        ))
    }

    /// Concatenates tensors along `axis`; all other extents must agree.
    pub fn concat(parts: &[&Tensor<S>], axis: usize) -> Result<Tensor<S>> {
        if parts.is_empty() {
            return Err(TensorError::Usage("concat of zero tensors".into()));
        }
        let first = parts[0].shape().to_vec();
        if axis >= first.len() {
            return Err(TensorError::Usage(format!(
                "concat axis {axis} out of range for shape {first:?}"
            )));
        }
        let mut total = 0usize;
        for p in parts {
            if p.ndim() != first.len()
                || p.shape()
                    .iter()
                    .enumerate()
                    .any(|(d, &e)| d != axis && e != first[d])
            {
                return Err(TensorError::dim("concat", &first, p.shape()));
            }
            total += p.shape()[axis];
        }
        let outer: usize = first[..axis].iter().product();
        let inner: usize = first[axis + 1..].iter().product();
        let mut out_shape = first.clone();
        out_shape[axis] = total;

        let mut out = vec![S::ZERO; outer * total * inner];
        let mut offset = 0usize;
        for p in parts {
            let e = p.shape()[axis];
            let pd = p.data();
            for o in 0..outer {
                let src = o * e * inner;
                let dst = (o * total + offset) * inner;
                out[dst..dst + e * inner].copy_from_slice(&pd[src..src + e * inner]);
            }
            offset += e;
        }

        let owned: Vec<Tensor<S>> = parts.iter().map(|p| (*p).clone()).collect();
        let extents: Vec<usize> = parts.iter().map(|p| p.shape()[axis]).collect();
        let owned_c = owned.clone();
        Ok(Tensor::from_op(out, out_shape, owned, move |_, g| {
            let mut offset = 0usize;
            for (p, &e) in owned_c.iter().zip(&extents) {
                if p.is_requires_grad() {
                    p.with_grad(|gp| {
                        for o in 0..outer {
                            let src = (o * total + offset) * inner;
                            let dst = o * e * inner;
                            for i in 0..e * inner {
                                gp[dst + i] += g[src + i];
                            }
                        }
                    });
                }
                offset += e;
            }
        }))
    }

    /// Broadcasts to `target`: the source shape is right-aligned, and each
    /// source extent must equal the target extent or be 1.
    pub fn expand(&self, target: &[usize]) -> Result<Tensor<S>> {
        let nd_src = self.ndim();
        let nd = target.len();
        if nd < nd_src {
            return Err(TensorError::dim("expand", self.shape(), target));
        }
        let pad = nd - nd_src;
        let mut src_ext = vec![1usize; nd];
        src_ext[pad..].copy_from_slice(self.shape());
        for d in 0..nd {
            if src_ext[d] != target[d] && src_ext[d] != 1 {
                return Err(TensorError::dim("expand", self.shape(), target));
            }
        }
        let src_strides_full = {
            let mut s = vec![0usize; nd];
            let real = strides(&src_ext);
            for d in 0..nd {
                s[d] = if src_ext[d] == 1 { 0 } else { real[d] };
            }
            s
        };
        let out_numel: usize = target.iter().product();
        let xd = self.data();
        let mut out = vec![S::ZERO; out_numel];
        let mut idx = vec![0usize; nd];
        let mut src = 0usize;
        for item in out.iter_mut() {
            *item = xd[src];
            for d in (0..nd).rev() {
                idx[d] += 1;
                src += src_strides_full[d];
                if idx[d] < target[d] {
                    break;
                }
                src -= src_strides_full[d] * target[d];
                idx[d] = 0;
            }
        }
        drop(xd);

        let pa = self.clone();
        let target_c = target.to_vec();
        Ok(Tensor::from_op(
            out,
            target.to_vec(),
            vec![self.clone()],
            move |_, g| {
                pa.with_grad(|ga| {
                    let mut idx = vec![0usize; nd];
                    let mut src = 0usize;
                    for gv in g.iter() {
                        ga[src] += *gv;
                        for d in (0..nd).rev() {
                            idx[d] += 1;
                            src += src_strides_full[d];
                            if idx[d] < target_c[d] {
                                break;
                            }
                            src -= src_strides_full[d] * target_c[d];
                            idx[d] = 0;
                        }
                    }
                });
            },
        ))
    }
}
