use std::cell::{Ref, RefCell, RefMut};
use std::collections::HashSet;
use std::rc::Rc;

use rand::Rng;

use crate::error::{Result, TensorError};
use crate::scalar::Scalar;

/// Backward rule of one recorded operation. Receives the output's data and
/// the gradient of the loss with respect to the output; pushes contributions
/// into the grads of the captured parent tensors.
pub(crate) type BackwardFn<S> = Box<dyn Fn(&[S], &[S])>;

pub(crate) struct Inner<S: Scalar> {
    shape: Vec<usize>,
    data: RefCell<Vec<S>>,
    requires_grad: bool,
    grad: RefCell<Option<Vec<S>>>,
    parents: Vec<Tensor<S>>,
    backward_fn: Option<BackwardFn<S>>,
}

/// Dense row-major tensor. Cloning is cheap (shared storage); data is
/// immutable after creation except for leaf parameters updated by the
/// optimizer and gradient accumulation.
pub struct Tensor<S: Scalar> {
    inner: Rc<Inner<S>>,
}

impl<S: Scalar> Clone for Tensor<S> {
    fn clone(&self) -> Self {
        Tensor {
            inner: Rc::clone(&self.inner),
        }
    }
}

impl<S: Scalar> std::fmt::Debug for Tensor<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tensor")
            .field("shape", &self.inner.shape)
            .field("requires_grad", &self.inner.requires_grad)
            .finish()
    }
}

pub(crate) fn check_shape_data<S: Scalar>(shape: &[usize], len: usize) -> Result<()> {
    let numel: usize = shape.iter().product();
    if numel != len {
        return Err(TensorError::Usage(format!(
            "shape {:?} implies {} elements, got {}",
            shape, numel, len
        )));
    }
    Ok(())
}

impl<S: Scalar> Tensor<S> {
    pub fn from_vec(data: Vec<S>, shape: &[usize]) -> Result<Self> {
        check_shape_data::<S>(shape, data.len())?;
        Ok(Self::leaf(data, shape.to_vec(), false))
    }

    pub fn scalar(v: S) -> Self {
        Self::leaf(vec![v], vec![], false)
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self::leaf(vec![S::ZERO; n], shape.to_vec(), false)
    }

    pub fn ones(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self::leaf(vec![S::ONE; n], shape.to_vec(), false)
    }

    pub fn full(shape: &[usize], v: S) -> Self {
        let n = shape.iter().product();
        Self::leaf(vec![v; n], shape.to_vec(), false)
    }

    /// Uniform samples in [lo, hi).
    pub fn uniform<R: Rng>(shape: &[usize], lo: f64, hi: f64, rng: &mut R) -> Self {
        let n: usize = shape.iter().product();
        let data = (0..n)
            .map(|_| S::from_f64(rng.gen_range(lo..hi)))
            .collect();
        Self::leaf(data, shape.to_vec(), false)
    }

    /// Standard-normal samples via Box-Muller, scaled by `std`.
    pub fn randn<R: Rng>(shape: &[usize], std: f64, rng: &mut R) -> Self {
        let n: usize = shape.iter().product();
        let data = (0..n)
            .map(|_| {
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                S::from_f64(z * std)
            })
            .collect();
        Self::leaf(data, shape.to_vec(), false)
    }

    /// Marks a leaf tensor as trainable. Only meaningful on leaves.
    pub fn requires_grad(self) -> Self {
        assert!(
            self.inner.backward_fn.is_none() && self.inner.parents.is_empty(),
            "requires_grad() is for leaf tensors"
        );
        Tensor {
            inner: Rc::new(Inner {
                shape: self.inner.shape.clone(),
                data: RefCell::new(self.inner.data.borrow().clone()),
                requires_grad: true,
                grad: RefCell::new(None),
                parents: Vec::new(),
                backward_fn: None,
            }),
        }
    }

    pub(crate) fn leaf(data: Vec<S>, shape: Vec<usize>, requires_grad: bool) -> Self {
        Tensor {
            inner: Rc::new(Inner {
                shape,
                data: RefCell::new(data),
                requires_grad,
                grad: RefCell::new(None),
                parents: Vec::new(),
                backward_fn: None,
            }),
        }
    }

    /// Graph-node constructor used by operations. The backward rule is only
    /// retained when some parent participates in differentiation.
    pub(crate) fn from_op(
        data: Vec<S>,
        shape: Vec<usize>,
        parents: Vec<Tensor<S>>,
        backward_fn: impl Fn(&[S], &[S]) + 'static,
    ) -> Self {
        let requires = parents.iter().any(|p| p.inner.requires_grad);
        Tensor {
            inner: Rc::new(Inner {
                shape,
                data: RefCell::new(data),
                requires_grad: requires,
                grad: RefCell::new(None),
                parents: if requires { parents } else { Vec::new() },
                backward_fn: if requires {
                    Some(Box::new(backward_fn))
                } else {
                    None
                },
            }),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.inner.shape
    }

    pub fn numel(&self) -> usize {
        self.inner.shape.iter().product()
    }

    pub fn ndim(&self) -> usize {
        self.inner.shape.len()
    }

    pub fn is_requires_grad(&self) -> bool {
        self.inner.requires_grad
    }

    pub fn data(&self) -> Ref<'_, Vec<S>> {
        self.inner.data.borrow()
    }

    pub(crate) fn data_mut(&self) -> RefMut<'_, Vec<S>> {
        self.inner.data.borrow_mut()
    }

    pub fn to_vec(&self) -> Vec<S> {
        self.inner.data.borrow().clone()
    }

    /// Value of a single-element tensor.
    pub fn item(&self) -> S {
        assert_eq!(self.numel(), 1, "item() requires a single-element tensor");
        self.inner.data.borrow()[0]
    }

    /// Overwrites the data of a leaf tensor (optimizer updates, checkpoint
    /// loads). Length must match.
    pub fn set_data(&self, new: &[S]) -> Result<()> {
        if new.len() != self.numel() {
            return Err(TensorError::Usage(format!(
                "set_data length {} does not match tensor of {} elements",
                new.len(),
                self.numel()
            )));
        }
        self.inner.data.borrow_mut().copy_from_slice(new);
        Ok(())
    }

    pub fn grad(&self) -> Option<Vec<S>> {
        self.inner.grad.borrow().clone()
    }

    pub fn zero_grad(&self) {
        *self.inner.grad.borrow_mut() = None;
    }

    /// Accumulates into this tensor's gradient buffer, allocating zeros on
    /// first touch.
    pub(crate) fn with_grad<F: FnOnce(&mut [S])>(&self, f: F) {
        let mut slot = self.inner.grad.borrow_mut();
        let buf = slot.get_or_insert_with(|| vec![S::ZERO; self.numel()]);
        f(buf);
    }

    pub(crate) fn grad_add_slice(&self, contrib: &[S]) {
        self.with_grad(|g| {
            for (gi, ci) in g.iter_mut().zip(contrib) {
                *gi += *ci;
            }
        });
    }

    /// Cuts the tensor out of the graph: same values, no gradient history.
    pub fn detach(&self) -> Tensor<S> {
        Self::leaf(self.to_vec(), self.inner.shape.clone(), false)
    }

    pub fn all_finite(&self) -> bool {
        self.inner.data.borrow().iter().all(|v| v.is_finite())
    }

    /// Reverse-mode differentiation from a scalar loss. Gradients accumulate
    /// additively into every reachable `requires_grad` tensor; call
    /// `zero_grad` between steps to reset.
    pub fn backward(&self) -> Result<()> {
        if self.numel() != 1 {
            return Err(TensorError::Usage(format!(
                "backward requires a scalar loss, got shape {:?}",
                self.inner.shape
            )));
        }
        if !self.inner.requires_grad {
            return Err(TensorError::Usage(
                "backward on a tensor that does not require grad".into(),
            ));
        }
        self.grad_add_slice(&[S::ONE]);
        let order = self.topo_order();
        for node in order.iter().rev() {
            if let Some(f) = &node.inner.backward_fn {
                let grad_ref = node.inner.grad.borrow();
                if let Some(g) = grad_ref.as_ref() {
                    let data = node.inner.data.borrow();
                    f(&data, g);
                }
            }
        }
        Ok(())
    }

    /// Iterative post-order DFS over parents: parents precede children, so
    /// reverse iteration visits each node only after its full gradient has
    /// been accumulated.
    fn topo_order(&self) -> Vec<Tensor<S>> {
        let mut order = Vec::new();
        let mut visited: HashSet<*const Inner<S>> = HashSet::new();
        // (node, child_cursor)
        let mut stack: Vec<(Tensor<S>, usize)> = vec![(self.clone(), 0)];
        visited.insert(Rc::as_ptr(&self.inner));
        while let Some((node, cursor)) = stack.pop() {
            if cursor < node.inner.parents.len() {
                let parent = node.inner.parents[cursor].clone();
                stack.push((node, cursor + 1));
                let key = Rc::as_ptr(&parent.inner);
                if parent.inner.requires_grad && !visited.contains(&key) {
                    visited.insert(key);
                    stack.push((parent, 0));
                }
            } else {
                order.push(node);
            }
        }
        order
    }
}
