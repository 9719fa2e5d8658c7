//! Every differentiable op against central finite differences, 64-bit,
//! eps = 1e-3, relative error < 1e-4, 20 random shapes per op.

use tensor_core::gradcheck::suite::{op_gradient_suite, FD_TOL};

#[test]
fn all_ops_pass_finite_difference_checks() {
    let reports = op_gradient_suite(20, 0x5eed).expect("suite ran");
    assert!(reports.len() >= 25, "expected every op covered");
    for r in &reports {
        assert!(
            r.passed(),
            "{}: max relative error {} over {} coordinates (tol {})",
            r.op,
            r.max_err,
            r.coordinates,
            FD_TOL
        );
        assert_eq!(r.shapes, 20);
    }
}

#[test]
fn double_use_of_a_tensor_sums_both_path_gradients() {
    use tensor_core::gradcheck::check_gradients;
    use tensor_core::Tensor;
    // loss = sum(x*x) + sum(x*c): x appears on two paths
    let report = check_gradients(
        |t| {
            let x = &t[0];
            let c = Tensor::from_vec(vec![0.5, -1.0, 2.0], &[3])?;
            x.mul(x)?.sum().add(&x.mul(&c)?.sum())
        },
        &[(vec![0.3, -0.7, 1.1], vec![3])],
        1e-3,
        16,
        7,
    )
    .unwrap();
    assert!(report.max_err < FD_TOL, "max err {}", report.max_err);
}

#[test]
fn random_composite_graph_gradient() {
    use tensor_core::gradcheck::check_gradients;
    // layered composite: matmul -> tanh -> layer-norm-free mix -> softmax -> weighted sum
    let report = check_gradients(
        |t| {
            let h = t[0].matmul(&t[1])?.tanh();
            let s = h.softmax(1)?;
            let m = s.mul(&h)?;
            Ok(m.sum())
        },
        &[
            ((0..6).map(|i| 0.1 * i as f64 - 0.2).collect(), vec![2, 3]),
            ((0..12).map(|i| 0.05 * i as f64 + 0.1).collect(), vec![3, 4]),
        ],
        1e-3,
        18,
        13,
    )
    .unwrap();
    assert!(report.max_err < FD_TOL, "max err {}", report.max_err);
}
