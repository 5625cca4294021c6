//! Seeded randomized truncated SVD of a linear operator.
//!
//! Randomized subspace iteration (Halko-Martinsson-Tropp style): draw a
//! Gaussian test matrix with `k + oversample` columns from the SplitMix64
//! stream, alternate forward and adjoint applications with modified
//! Gram-Schmidt re-orthonormalization at every half step, then extract
//! singular triplets from the captured subspace by Rayleigh-Ritz. The whole
//! procedure is a pure function of (operator, k, seed).

use crate::dense::{jacobi_svd, mgs_qr, orthonormalize, Mat};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::sparse::LinearOperator;

/// Top-k singular triplets of an operator: `op ~ u diag(s) v^T`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Mat,
    pub singular_values: Vec<f64>,
    pub v: Mat,
}

impl SvdResult {
    pub fn k(&self) -> usize {
        self.singular_values.len()
    }

    /// Dense rank-k product `u diag(s) v^T`.
    pub fn reconstruct(&self) -> Mat {
        let mut us = self.u.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            us.scale_col(j, s);
        }
        us.matmul(&self.v.transpose())
    }
}

/// Default number of extra test-matrix columns beyond k.
pub const DEFAULT_OVERSAMPLE: usize = 10;
/// Default number of forward/adjoint power iterations.
pub const DEFAULT_POWER_ITERS: usize = 5;

/// Randomized truncated SVD. Deterministic for a fixed (operator, k, seed).
pub fn truncated_svd(
    op: &LinearOperator,
    k: usize,
    seed: u64,
    oversample: usize,
    power_iters: usize,
) -> Result<SvdResult> {
    let (n, d) = (op.n_rows(), op.n_cols());
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "operator has a zero dimension".into(),
        ));
    }
    if k < 1 || k > n.min(d) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} out of range for {n}x{d} operator"
        )));
    }
    let l = (k + oversample).min(n.min(d));

    let mut rng = SplitMix64::new(seed);
    let omega = Mat::from_fn(d, l, |_, _| rng.next_normal());

    let mut q = orthonormalize(&op.apply_mat(&omega)?);
    for _ in 0..power_iters {
        let w = orthonormalize(&op.apply_adjoint_mat(&q)?);
        q = orthonormalize(&op.apply_mat(&w)?);
    }

    // Rayleigh-Ritz on the captured subspace: with B = op^T Q = Q_b R_b,
    // op ~ Q R_b^T Q_b^T, and an l-by-l SVD of R_b^T finishes the job.
    let b = op.apply_adjoint_mat(&q)?;
    let (q_b, r_b) = mgs_qr(&b);
    let (p, sigma, s) = jacobi_svd(&r_b.transpose());

    let u_full = q.matmul(&p);
    let v_full = q_b.matmul(&s);
    let u = Mat::from_fn(n, k, |i, j| u_full[(i, j)]);
    let v = Mat::from_fn(d, k, |i, j| v_full[(i, j)]);
    Ok(SvdResult {
        u,
        singular_values: sigma[..k].to_vec(),
        v,
    })
}

/// Full SVD of a dense matrix by one-sided Jacobi; the reference the
/// randomized path is tested against. Guarded to small problems.
pub fn dense_svd_oracle(m: &Mat) -> Result<SvdResult> {
    if m.rows().min(m.cols()) > 500 {
        return Err(Error::SizeGuard(format!(
            "dense_svd_oracle limited to min dimension 500, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let (u, singular_values, v) = jacobi_svd(m);
    Ok(SvdResult {
        u,
        singular_values,
        v,
    })
}
