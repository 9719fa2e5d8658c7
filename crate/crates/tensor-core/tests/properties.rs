//! Property tests for graph invariants and the checkpoint container.

use proptest::prelude::*;
use tensor_core::{checkpoint, Tensor};

proptest! {
    #[test]
    fn softmax_slices_sum_to_one(
        rows in 1usize..5,
        cols in 1usize..8,
        raw in proptest::collection::vec(-8.0f64..8.0, 1..40),
    ) {
        let n = rows * cols;
        let data: Vec<f64> = (0..n).map(|i| raw[i % raw.len()] + i as f64 * 1e-3).collect();
        let x = Tensor::from_vec(data, &[rows, cols]).unwrap();
        let y = x.softmax(1).unwrap();
        let yd = y.to_vec();
        for r in 0..rows {
            let s: f64 = yd[r * cols..(r + 1) * cols].iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-6, "row {} sums to {}", r, s);
            for v in &yd[r * cols..(r + 1) * cols] {
                prop_assert!((0.0..=1.0).contains(v));
            }
        }
    }

    #[test]
    fn checkpoint_roundtrip_is_bit_exact(
        shape in proptest::collection::vec(1usize..5, 1..4),
        seedval in 0u64..10_000,
    ) {
        let n: usize = shape.iter().product();
        // deterministic but irregular payload; includes subnormals and negatives
        let data: Vec<f32> = (0..n)
            .map(|i| {
                let bits = (seedval as u32)
                    .wrapping_mul(2654435761)
                    .wrapping_add(i as u32 * 40503);
                f32::from_bits(bits & 0x7f7f_ffff) * if bits & 1 == 0 { 1.0 } else { -1.0 }
            })
            .collect();
        let t = Tensor::from_vec(data.clone(), &shape).unwrap();
        let dir = std::env::temp_dir().join(format!("tc-ckpt-{seedval}-{n}"));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.qrvos");
        checkpoint::save(&path, [("weights.w", &t)]).unwrap();
        let loaded = checkpoint::load::<f32>(&path).unwrap();
        std::fs::remove_dir_all(&dir).ok();
        prop_assert_eq!(loaded.len(), 1);
        let (name, lt) = &loaded[0];
        prop_assert_eq!(name.as_str(), "weights.w");
        prop_assert_eq!(lt.shape(), &shape[..]);
        let lv = lt.to_vec();
        for (a, b) in data.iter().zip(lv.iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn same_inputs_same_outputs(
        vals in proptest::collection::vec(-2.0f32..2.0, 4..24),
    ) {
        // fixed-precision determinism: re-running the same graph bit-matches
        let n = vals.len() / 2 * 2;
        let run = || {
            let a = Tensor::from_vec(vals[..n / 2].to_vec(), &[1, n / 2]).unwrap();
            let b = Tensor::from_vec(vals[n / 2..n].to_vec(), &[n / 2, 1]).unwrap();
            let y = a.matmul(&b).unwrap().tanh().sigmoid();
            y.to_vec()
        };
        let y1 = run();
        let y2 = run();
        for (u, v) in y1.iter().zip(y2.iter()) {
            prop_assert_eq!(u.to_bits(), v.to_bits());
        }
    }
}

#[test]
fn checkpoint_rejects_bad_magic() {
    let dir = std::env::temp_dir().join("tc-ckpt-badmagic");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.qrvos");
    std::fs::write(&path, b"NOTQRV\x00\x00\x00\x00").unwrap();
    let err = checkpoint::load::<f32>(&path).unwrap_err().to_string();
    std::fs::remove_dir_all(&dir).ok();
    assert!(err.contains("magic"), "{err}");
}

#[test]
fn checkpoint_rejects_dtype_mismatch() {
    let dir = std::env::temp_dir().join("tc-ckpt-dtype");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.qrvos");
    let t = Tensor::<f32>::ones(&[2]);
    checkpoint::save(&path, [("x", &t)]).unwrap();
    let err = checkpoint::load::<f64>(&path).unwrap_err().to_string();
    std::fs::remove_dir_all(&dir).ok();
    assert!(err.contains("dtype") || err.contains("F32"), "{err}");
}

#[test]
fn grad_present_only_after_backward_on_requires_grad() {
    let x = Tensor::from_vec(vec![1.0f64, 2.0], &[2]).unwrap().requires_grad();
    assert!(x.grad().is_none());
    x.sum().backward().unwrap();
    assert_eq!(x.grad().unwrap(), vec![1.0, 1.0]);
    x.zero_grad();
    assert!(x.grad().is_none());
}

#[test]
fn non_requires_grad_graph_stays_gradless() {
    let x = Tensor::from_vec(vec![1.0f64, 2.0], &[2]).unwrap();
    let y = x.mul(&x).unwrap().sum();
    assert!(y.backward().is_err());
    assert!(x.grad().is_none());
}
