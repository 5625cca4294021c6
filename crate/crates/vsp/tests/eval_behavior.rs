//! Topic estimation on exact-algebra instances, norm properties, and the
//! scale coherence of the estimator.

use proptest::prelude::*;
use vsp::dense::Mat;
use vsp::eval::{estimate_topics, topic_l1_error, two_to_inf_norm};
use vsp::rng::SplitMix64;
use vsp::sparse::{build_operator, compute_centering_stats, CenterMode, SparseMatrix};

fn dense_to_sparse(m: &Mat) -> SparseMatrix {
    let mut trips = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)] != 0.0 {
                trips.push((i, j, m[(i, j)]));
            }
        }
    }
    SparseMatrix::from_triplets(m.rows(), m.cols(), trips).unwrap()
}

/// Noiseless construction with exactly orthogonal centered factors: the
/// centered columns are zero-sum Walsh patterns, so Phi = Z^T (X - 1 m')
/// beta^T collapses to a diagonal times beta^T and the estimate equals the
/// truth to floating point.
#[test]
fn topics_recovered_in_exact_algebra() {
    let (n, d, k) = (200usize, 30, 3);
    let walsh = |i: usize, l: usize| -> f64 {
        match l {
            0 => [1.0, -1.0, 1.0, -1.0][i % 4],
            1 => [1.0, 1.0, -1.0, -1.0][i % 4],
            _ => [1.0, -1.0, -1.0, 1.0][i % 4],
        }
    };
    // positive factors: offset 2 plus the zero-sum Walsh pattern
    let x = Mat::from_fn(n, k, |i, l| 2.0 + walsh(i, l));
    let beta = vsp::models::LdaSpec::block_topics(d, k, 10, 1.0).unwrap();
    let a_dense = x.matmul(&beta.transpose());
    let a = dense_to_sparse(&a_dense);

    let stats = compute_centering_stats(&a);
    let op = build_operator(&a, None, Some(stats), CenterMode::ColumnOnly).unwrap();
    let centered = Mat::from_fn(n, k, walsh);
    let beta_hat = estimate_topics(&centered, &op).unwrap();

    let err = topic_l1_error(&beta_hat, &beta).unwrap();
    assert!(err < 1e-8, "l1 error {err}");
    // unit signed-l1 columns by construction
    for l in 0..k {
        let s: f64 = beta_hat.col(l).iter().map(|v| v.abs()).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}

/// Replacing the factors by a positive multiple leaves the estimate
/// unchanged: the row normalization absorbs the scale.
#[test]
fn topic_estimator_scale_coherent() {
    let mut rng = SplitMix64::new(9);
    let m = Mat::from_fn(40, 20, |_, _| rng.next_f64());
    let a = dense_to_sparse(&m);
    let stats = compute_centering_stats(&a);
    let op = build_operator(&a, None, Some(stats), CenterMode::ColumnOnly).unwrap();
    let z = Mat::from_fn(40, 2, |_, _| rng.next_normal());
    let b1 = estimate_topics(&z, &op).unwrap();
    let b2 = estimate_topics(&z.scale(3.7), &op).unwrap();
    assert!(b1.sub(&b2).max_abs() < 1e-14);
}

/// Degenerate topic: factors orthogonal to every column yield a zero row.
#[test]
fn zero_phi_row_is_an_error() {
    let a = SparseMatrix::from_triplets(4, 3, vec![(0, 0, 1.0)]).unwrap();
    let op = build_operator(&a, None, None, CenterMode::Full).unwrap();
    // factor supported where the matrix is zero
    let z = Mat::from_fn(4, 1, |i, _| if i == 3 { 1.0 } else { 0.0 });
    assert!(matches!(
        estimate_topics(&z, &op),
        Err(vsp::Error::DegenerateTopic(0))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // norm axioms on random triples: triangle inequality and absolute
    // homogeneity
    #[test]
    fn two_inf_norm_is_a_norm(seed in 0u64..10_000, n in 1usize..12, k in 1usize..5, c in -3.0f64..3.0) {
        let mut rng = SplitMix64::new(seed);
        let a = Mat::from_fn(n, k, |_, _| rng.next_normal());
        let b = Mat::from_fn(n, k, |_, _| rng.next_normal());
        let sum = Mat::from_fn(n, k, |i, j| a[(i, j)] + b[(i, j)]);
        let na = two_to_inf_norm(&a);
        let nb = two_to_inf_norm(&b);
        let ns = two_to_inf_norm(&sum);
        prop_assert!(ns <= na + nb + 1e-12 * (na + nb).max(1.0));
        let scaled = a.scale(c);
        let nsc = two_to_inf_norm(&scaled);
        prop_assert!((nsc - c.abs() * na).abs() <= 1e-12 * (na.max(1.0)));
    }
}
