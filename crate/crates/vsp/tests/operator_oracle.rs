//! Implicit operators against dense oracles: the centered/scaled products
//! must agree with explicitly materialized matrices, adjoints must be true
//! adjoints, and the centering identities must hold.

use proptest::prelude::*;
use vsp::dense::Mat;
use vsp::rng::SplitMix64;
use vsp::sparse::{
    build_operator, centered_matvec, centered_rmatvec, centering_stats_of_base,
    compute_centering_stats, compute_scaling_stats, materialize_dense, CenterMode, SparseMatrix,
};

fn random_sparse(n: usize, d: usize, density: f64, nonneg: bool, seed: u64) -> SparseMatrix {
    let mut rng = SplitMix64::new(seed);
    let mut trips = Vec::new();
    for i in 0..n {
        for j in 0..d {
            if rng.next_f64() < density {
                let v = if nonneg {
                    rng.next_f64() + 0.05
                } else {
                    rng.next_normal()
                };
                trips.push((i, j, v));
            }
        }
    }
    // at least one entry so scaling stays defined
    trips.push((0, 0, 1.0));
    SparseMatrix::from_triplets(n, d, trips).unwrap()
}

fn random_vec(len: usize, rng: &mut SplitMix64) -> Vec<f64> {
    (0..len).map(|_| rng.next_normal()).collect()
}

/// Dense double centering, written independently of the operator path.
fn dense_centered(a: &SparseMatrix) -> Mat {
    let d = a.to_dense();
    let (n, m) = (d.rows(), d.cols());
    let mut mu_r = vec![0.0; n];
    let mut mu_c = vec![0.0; m];
    let mut grand = 0.0;
    for i in 0..n {
        for j in 0..m {
            mu_r[i] += d[(i, j)] / m as f64;
            mu_c[j] += d[(i, j)] / n as f64;
            grand += d[(i, j)] / (n * m) as f64;
        }
    }
    Mat::from_fn(n, m, |i, j| d[(i, j)] - mu_r[i] - mu_c[j] + grand)
}

#[test]
fn centering_stats_match_dense_on_random_matrix() {
    let a = random_sparse(50, 40, 0.2, false, 1);
    let stats = compute_centering_stats(&a);
    let dense = a.to_dense();
    for i in 0..50 {
        let m: f64 = dense.row(i).iter().sum::<f64>() / 40.0;
        assert!((stats.mu_r[i] - m).abs() < 1e-13);
    }
    for j in 0..40 {
        let m: f64 = (0..50).map(|i| dense[(i, j)]).sum::<f64>() / 50.0;
        assert!((stats.mu_c[j] - m).abs() < 1e-13);
    }
}

#[test]
fn centered_products_match_dense_oracle() {
    let mut rng = SplitMix64::new(2);
    for seed in 0..6 {
        let a = random_sparse(50, 40, 0.15, false, 100 + seed);
        let stats = compute_centering_stats(&a);
        let oracle = dense_centered(&a);
        let x = random_vec(40, &mut rng);
        let fast = centered_matvec(&a, &stats, &x).unwrap();
        let slow = oracle.matvec(&x);
        for (f, s) in fast.iter().zip(&slow) {
            assert!((f - s).abs() < 1e-12, "matvec mismatch {f} vs {s}");
        }
        let y = random_vec(50, &mut rng);
        let fast_t = centered_rmatvec(&a, &stats, &y).unwrap();
        let slow_t = oracle.transpose().matvec(&y);
        for (f, s) in fast_t.iter().zip(&slow_t) {
            assert!((f - s).abs() < 1e-12, "rmatvec mismatch {f} vs {s}");
        }
    }
}

#[test]
fn scaled_operator_matches_dense_oracle() {
    for seed in 0..4 {
        let a = random_sparse(30, 25, 0.25, true, 300 + seed);
        let scale = compute_scaling_stats(&a).unwrap();
        // dense oracle: D_r^{-1/2} A D_c^{-1/2} built explicitly
        let dense = a.to_dense();
        let l = Mat::from_fn(30, 25, |i, j| {
            dense[(i, j)] / ((scale.deg_r[i] + scale.tau_r) * (scale.deg_c[j] + scale.tau_c)).sqrt()
        });
        let op = build_operator(&a, Some(scale), None, CenterMode::Full).unwrap();
        let got = materialize_dense(&op).unwrap();
        assert!(got.sub(&l).max_abs() < 1e-13);
    }
}

#[test]
fn scaled_and_centered_composition_matches_oracle() {
    let mut rng = SplitMix64::new(5);
    for seed in 0..4 {
        let a = random_sparse(30, 25, 0.3, true, 400 + seed);
        let scale = compute_scaling_stats(&a).unwrap();
        let center = centering_stats_of_base(&a, Some(&scale));
        let op = build_operator(&a, Some(scale.clone()), Some(center), CenterMode::Full).unwrap();

        // oracle: materialize L densely, then double center it
        let dense = a.to_dense();
        let l = Mat::from_fn(30, 25, |i, j| {
            dense[(i, j)] / ((scale.deg_r[i] + scale.tau_r) * (scale.deg_c[j] + scale.tau_c)).sqrt()
        });
        let mut trips = Vec::new();
        for i in 0..30 {
            for j in 0..25 {
                trips.push((i, j, l[(i, j)]));
            }
        }
        let l_sparse = SparseMatrix::from_triplets(30, 25, trips).unwrap();
        let oracle = dense_centered(&l_sparse);

        let x = random_vec(25, &mut rng);
        let got = op.apply(&x).unwrap();
        let want = oracle.matvec(&x);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }
}

#[test]
fn adjoint_consistency_inner_product_test() {
    let mut rng = SplitMix64::new(7);
    for seed in 0..5 {
        let a = random_sparse(40, 30, 0.2, true, 500 + seed);
        let scale = compute_scaling_stats(&a).unwrap();
        let center = centering_stats_of_base(&a, Some(&scale));
        for (sc, ce, mode) in [
            (None, None, CenterMode::Full),
            (Some(scale.clone()), None, CenterMode::Full),
            (None, Some(compute_centering_stats(&a)), CenterMode::Full),
            (
                None,
                Some(compute_centering_stats(&a)),
                CenterMode::ColumnOnly,
            ),
            (Some(scale.clone()), Some(center.clone()), CenterMode::Full),
        ] {
            let op = build_operator(&a, sc, ce, mode).unwrap();
            let x = random_vec(30, &mut rng);
            let y = random_vec(40, &mut rng);
            let mx = op.apply(&x).unwrap();
            let mty = op.apply_adjoint(&y).unwrap();
            let lhs = vsp::dense::dot(&mx, &y);
            let rhs = vsp::dense::dot(&x, &mty);
            let scale_est = materialize_dense(&op).unwrap().frob_norm()
                * vsp::dense::dot(&x, &x).sqrt()
                * vsp::dense::dot(&y, &y).sqrt();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * scale_est.max(1e-12),
                "adjoint mismatch: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn column_only_mode_matches_dense_column_centering() {
    let a = random_sparse(20, 15, 0.4, false, 900);
    let stats = compute_centering_stats(&a);
    let op = build_operator(&a, None, Some(stats.clone()), CenterMode::ColumnOnly).unwrap();
    let dense = a.to_dense();
    let oracle = Mat::from_fn(20, 15, |i, j| dense[(i, j)] - stats.mu_c[j]);
    let got = materialize_dense(&op).unwrap();
    assert!(got.sub(&oracle).max_abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // double centering annihilates constant vectors on both sides
    #[test]
    fn double_centering_annihilates_ones(seed in 0u64..1000, n in 2usize..24, d in 2usize..24) {
        let a = random_sparse(n, d, 0.3, false, seed);
        let stats = compute_centering_stats(&a);
        let scale = a.max_abs().max(1.0);
        let y = centered_matvec(&a, &stats, &vec![1.0; d]).unwrap();
        prop_assert!(y.iter().all(|v| v.abs() <= 1e-10 * scale));
        let x = centered_rmatvec(&a, &stats, &vec![1.0; n]).unwrap();
        prop_assert!(x.iter().all(|v| v.abs() <= 1e-10 * scale));
    }

    // implicit products agree with the materialized operator
    #[test]
    fn implicit_equals_materialized(seed in 0u64..1000, n in 2usize..20, d in 2usize..20) {
        let a = random_sparse(n, d, 0.35, true, seed);
        let scale = compute_scaling_stats(&a).unwrap();
        let center = centering_stats_of_base(&a, Some(&scale));
        let op = build_operator(&a, Some(scale), Some(center), CenterMode::Full).unwrap();
        let dense = materialize_dense(&op).unwrap();
        let mut rng = SplitMix64::new(seed ^ 0xabcdef);
        let x = random_vec(d, &mut rng);
        let implicit = op.apply(&x).unwrap();
        let explicit = dense.matvec(&x);
        let norm = dense.frob_norm().max(1.0);
        for (a, b) in implicit.iter().zip(&explicit) {
            prop_assert!((a - b).abs() <= 1e-12 * norm);
        }
    }
}
