use crate::error::{Result, TensorError};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// Per-batch element offsets for the two operands and the output, with
/// size-1 batch dims broadcasting (stride 0).
struct BatchMap {
    batch_shape: Vec<usize>,
    a_strides: Vec<usize>,
    b_strides: Vec<usize>,
}

impl BatchMap {
    fn build(a_batch: &[usize], b_batch: &[usize], op: &'static str) -> Result<BatchMap> {
        let rank = a_batch.len().max(b_batch.len());
        let mut batch_shape = vec![1usize; rank];
        let pad_a = rank - a_batch.len();
        let pad_b = rank - b_batch.len();
        for i in 0..rank {
            let da = if i >= pad_a { a_batch[i - pad_a] } else { 1 };
            let db = if i >= pad_b { b_batch[i - pad_b] } else { 1 };
            if da != db && da != 1 && db != 1 {
                return Err(TensorError::dim(op, a_batch, b_batch));
            }
            batch_shape[i] = da.max(db);
        }
        let strides_of = |dims: &[usize], pad: usize, mat: usize| {
            let mut s = vec![0usize; rank];
            let mut acc = mat;
            for i in (0..dims.len()).rev() {
                if dims[i] != 1 {
                    s[i + pad] = acc;
                }
                acc *= dims[i];
            }
            s
        };
        Ok(BatchMap {
            a_strides: strides_of(a_batch, pad_a, 1),
            b_strides: strides_of(b_batch, pad_b, 1),
            batch_shape,
        })
    }

    fn count(&self) -> usize {
        self.batch_shape.iter().product()
    }

    /// (a_offset, b_offset) in units of matrices for flat batch index `i`.
    fn offsets(&self, mut i: usize) -> (usize, usize) {
        let (mut oa, mut ob) = (0usize, 0usize);
        for d in (0..self.batch_shape.len()).rev() {
            let idx = i % self.batch_shape[d];
            i /= self.batch_shape[d];
            oa += idx * self.a_strides[d];
            ob += idx * self.b_strides[d];
        }
        (oa, ob)
    }
}

fn gemm_block<S: Scalar>(
    m: usize,
    k: usize,
    n: usize,
    a: &[S],
    a_trans: bool,
    b: &[S],
    b_trans: bool,
    beta: S,
    c: &mut [S],
) {
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        if beta == S::ZERO {
            c[..m * n].iter_mut().for_each(|v| *v = S::ZERO);
        }
        return;
    }
    let (rsa, csa) = if a_trans {
        (1isize, m as isize)
    } else {
        (k as isize, 1isize)
    };
    let (rsb, csb) = if b_trans {
        (1isize, k as isize)
    } else {
        (n as isize, 1isize)
    };
    unsafe {
        S::gemm(
            m,
            k,
            n,
            S::ONE,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

impl<S: Scalar> Tensor<S> {
    /// Batched matrix product [.., M, K] x [.., K, P] -> [.., M, P].
    /// Leading batch extents broadcast where one side is 1 (or absent).
    pub fn matmul(&self, rhs: &Tensor<S>) -> Result<Tensor<S>> {
        if self.ndim() < 2 || rhs.ndim() < 2 {
            return Err(TensorError::dim("matmul", self.shape(), rhs.shape()));
        }
        let (m, k) = (
            self.shape()[self.ndim() - 2],
            self.shape()[self.ndim() - 1],
        );
        let (k2, p) = (rhs.shape()[rhs.ndim() - 2], rhs.shape()[rhs.ndim() - 1]);
        if k != k2 {
            return Err(TensorError::dim("matmul", self.shape(), rhs.shape()));
        }
        let map = BatchMap::build(
            &self.shape()[..self.ndim() - 2],
            &rhs.shape()[..rhs.ndim() - 2],
            "matmul",
        )?;

        let batches = map.count();
        let mut out = vec![S::ZERO; batches * m * p];
        {
            let ad = self.data();
            let bd = rhs.data();
            for i in 0..batches {
                let (oa, ob) = map.offsets(i);
                gemm_block(
                    m,
                    k,
                    p,
                    &ad[oa * m * k..],
                    false,
                    &bd[ob * k * p..],
                    false,
                    S::ZERO,
                    &mut out[i * m * p..],
                );
            }
        }
        let mut out_shape = map.batch_shape.clone();
        out_shape.push(m);
        out_shape.push(p);

        let (pa, pb) = (self.clone(), rhs.clone());
        Ok(Tensor::from_op(
            out,
            out_shape,
            vec![self.clone(), rhs.clone()],
            move |_, g| {
                if pa.is_requires_grad() {
                    let bd = pb.data();
                    pa.with_grad(|ga| {
                        for i in 0..map.count() {
                            let (oa, ob) = map.offsets(i);
                            // dA = g . B^T, accumulated (broadcast batches sum)
                            gemm_block(
                                m,
                                p,
                                k,
                                &g[i * m * p..],
                                false,
                                &bd[ob * k * p..],
                                true,
                                S::ONE,
                                &mut ga[oa * m * k..],
                            );
                        }
                    });
                }
                if pb.is_requires_grad() {
                    let ad = pa.data();
                    pb.with_grad(|gb| {
                        for i in 0..map.count() {
                            let (oa, ob) = map.offsets(i);
                            // dB = A^T . g
                            gemm_block(
                                k,
                                m,
                                p,
                                &ad[oa * m * k..],
                                true,
                                &g[i * m * p..],
                                false,
                                S::ONE,
                                &mut gb[ob * k * p..],
                            );
                        }
                    });
                }
            },
        ))
    }
}
