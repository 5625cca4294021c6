//! Evaluation harness: alignment over signed permutations, row-wise error
//! norms, topic estimation and its l1 error, convergence sweeps, and
//! exportable diagnostics.

pub mod constants;
mod diagnostics;
mod sweep;

pub use diagnostics::{diagnostics, DiagnosticsBundle, DEFAULT_PAIR_SAMPLE};
pub use sweep::{convergence_sweep, SweepCell, SweepFamily, SweepResult, SweepSummaryRow};

use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::sparse::LinearOperator;
use crate::varimax::{enumerate_signed_permutations, SignedPermutation};

/// Maximum row l2 norm.
pub fn two_to_inf_norm(m: &Mat) -> f64 {
    (0..m.rows())
        .map(|i| crate::dense::dot(m.row(i), m.row(i)).sqrt())
        .fold(0.0, f64::max)
}

/// How [`align_factors`] searches the signed-permutation class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignMode {
    /// Exhaustive minimization of the row-wise error; k <= 8.
    Exact,
    /// Column matching by maximal absolute correlation; an upper bound on
    /// the exact minimum.
    Greedy,
}

#[derive(Debug, Clone)]
pub struct AlignmentResult {
    pub best_p: SignedPermutation,
    pub err_two_inf: f64,
    pub err_frob: f64,
}

/// Finds the signed permutation P minimizing the maximum row l2 norm of
/// `est - truth P`.
pub fn align_factors(est: &Mat, truth: &Mat, mode: AlignMode) -> Result<AlignmentResult> {
    if est.rows() != truth.rows() || est.cols() != truth.cols() {
        return Err(Error::DimensionMismatch(format!(
            "align_factors: {}x{} vs {}x{}",
            est.rows(),
            est.cols(),
            truth.rows(),
            truth.cols()
        )));
    }
    let k = est.cols();
    match mode {
        AlignMode::Exact => {
            let candidates = enumerate_signed_permutations(k)?;
            let mut best: Option<(SignedPermutation, f64)> = None;
            for p in candidates {
                let bound = best.as_ref().map(|(_, e)| *e).unwrap_or(f64::INFINITY);
                if let Some(err) = max_row_err_bounded(est, truth, &p, bound) {
                    best = Some((p, err));
                }
            }
            let (best_p, err_two_inf) =
                best.ok_or_else(|| Error::InvalidArgument("no candidates".into()))?;
            let err_frob = frob_err(est, truth, &best_p);
            Ok(AlignmentResult {
                best_p,
                err_two_inf,
                err_frob,
            })
        }
        AlignMode::Greedy => {
            let p = greedy_match(est, truth);
            let err_two_inf = max_row_err_bounded(est, truth, &p, f64::INFINITY)
                .expect("unbounded evaluation always yields a value");
            let err_frob = frob_err(est, truth, &p);
            Ok(AlignmentResult {
                best_p: p,
                err_two_inf,
                err_frob,
            })
        }
    }
}

/// Max row l2 error of `est - truth P`, abandoning early once it provably
/// reaches `bound`. Returns None when abandoned.
fn max_row_err_bounded(est: &Mat, truth: &Mat, p: &SignedPermutation, bound: f64) -> Option<f64> {
    let k = p.k();
    let bound_sq = bound * bound;
    let mut worst = 0.0f64;
    for i in 0..est.rows() {
        let erow = est.row(i);
        let trow = truth.row(i);
        let mut sq = 0.0;
        for j in 0..k {
            let d = erow[j] - p.signs()[j] as f64 * trow[p.perm()[j]];
            sq += d * d;
            if sq >= bound_sq {
                return None;
            }
        }
        worst = worst.max(sq);
    }
    Some(worst.sqrt())
}

fn frob_err(est: &Mat, truth: &Mat, p: &SignedPermutation) -> f64 {
    let k = p.k();
    let mut total = 0.0;
    for i in 0..est.rows() {
        let erow = est.row(i);
        let trow = truth.row(i);
        for j in 0..k {
            let d = erow[j] - p.signs()[j] as f64 * trow[p.perm()[j]];
            total += d * d;
        }
    }
    total.sqrt()
}

fn greedy_match(est: &Mat, truth: &Mat) -> SignedPermutation {
    let k = est.cols();
    let n = est.rows();
    // centered correlations between est and truth columns
    let corr = |a: &[f64], b: &[f64]| -> f64 {
        let nf = n as f64;
        let ma = a.iter().sum::<f64>() / nf;
        let mb = b.iter().sum::<f64>() / nf;
        let mut num = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for i in 0..n {
            let da = a[i] - ma;
            let db = b[i] - mb;
            num += da * db;
            va += da * da;
            vb += db * db;
        }
        if va <= 0.0 || vb <= 0.0 {
            0.0
        } else {
            num / (va * vb).sqrt()
        }
    };
    let est_cols: Vec<Vec<f64>> = est.to_cols();
    let truth_cols: Vec<Vec<f64>> = truth.to_cols();
    let mut c = Mat::zeros(k, k);
    for e in 0..k {
        for t in 0..k {
            c[(e, t)] = corr(&est_cols[e], &truth_cols[t]);
        }
    }
    let mut perm = vec![usize::MAX; k];
    let mut signs = vec![1i8; k];
    let mut est_used = vec![false; k];
    let mut truth_used = vec![false; k];
    for _ in 0..k {
        let mut best = (0usize, 0usize, -1.0f64);
        for e in 0..k {
            if est_used[e] {
                continue;
            }
            for t in 0..k {
                if truth_used[t] {
                    continue;
                }
                if c[(e, t)].abs() > best.2 {
                    best = (e, t, c[(e, t)].abs());
                }
            }
        }
        let (e, t, _) = best;
        est_used[e] = true;
        truth_used[t] = true;
        perm[e] = t;
        signs[e] = if c[(e, t)] < 0.0 { -1 } else { 1 };
    }
    SignedPermutation::new(perm, signs).expect("greedy assignment is a permutation")
}

/// Topic estimator: Phi = Z^T M (k adjoint applications of the
/// column-centered operator), each row normalized by its l1 norm; the
/// estimate is the transpose, so columns have unit signed-l1 norm.
pub fn estimate_topics(z_hat: &Mat, op: &LinearOperator) -> Result<Mat> {
    if z_hat.rows() != op.n_rows() {
        return Err(Error::DimensionMismatch(
            "factor rows do not match operator rows".into(),
        ));
    }
    let k = z_hat.cols();
    let d = op.n_cols();
    let mut beta = Mat::zeros(d, k);
    for l in 0..k {
        let phi = op.apply_adjoint(&z_hat.col(l))?;
        let lam: f64 = phi.iter().map(|v| v.abs()).sum();
        if lam == 0.0 {
            return Err(Error::DegenerateTopic(l));
        }
        for (w, &v) in phi.iter().enumerate() {
            beta[(w, l)] = v / lam;
        }
    }
    Ok(beta)
}

/// Post-hoc simplex projection: clips negative entries to zero and
/// renormalizes each column to unit l1 norm. This is a convenience
/// projection, not part of the estimator.
pub fn clip_simplex(beta: &Mat) -> Result<Mat> {
    let mut out = beta.clone();
    for j in 0..beta.cols() {
        let mut sum = 0.0;
        for i in 0..beta.rows() {
            let v = out[(i, j)].max(0.0);
            out[(i, j)] = v;
            sum += v;
        }
        if sum == 0.0 {
            return Err(Error::DegenerateTopic(j));
        }
        out.scale_col(j, 1.0 / sum);
    }
    Ok(out)
}

/// min over signed permutations P of max over topics l of
/// || beta_hat[:, l] - (beta P)[:, l] ||_1.
pub fn topic_l1_error(beta_hat: &Mat, beta: &Mat) -> Result<f64> {
    if beta_hat.rows() != beta.rows() || beta_hat.cols() != beta.cols() {
        return Err(Error::DimensionMismatch(format!(
            "topic matrices {}x{} vs {}x{}",
            beta_hat.rows(),
            beta_hat.cols(),
            beta.rows(),
            beta.cols()
        )));
    }
    let k = beta.cols();
    let mut best = f64::INFINITY;
    for p in enumerate_signed_permutations(k)? {
        let mut worst = 0.0f64;
        for l in 0..k {
            let sign = p.signs()[l] as f64;
            let src = p.perm()[l];
            let mut acc = 0.0;
            for w in 0..beta.rows() {
                acc += (beta_hat[(w, l)] - sign * beta[(w, src)]).abs();
            }
            worst = worst.max(acc);
            if worst >= best {
                break;
            }
        }
        best = best.min(worst);
    }
    Ok(best)
}
