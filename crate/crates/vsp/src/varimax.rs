//! The Varimax criterion and its maximization over the orthogonal group.
//!
//! The criterion for an n-by-k loading matrix U and rotation R is
//!
//! ```text
//! v(R, U) = sum_l [ mean_i([UR]_il^4) - (mean_i([UR]_il^2))^2 ]
//! ```
//!
//! the summed column variances of the squared rotated loadings. Both terms
//! are always evaluated, also when U has orthonormal columns and the second
//! term is constant.
//!
//! The solver is the classical cyclic pairwise scheme: for every column
//! pair the optimal planar angle has a closed form, because restricted to
//! one pair the criterion is `const + amp * cos(4 phi - shift)`. Each pair
//! update is an exact maximization, so the objective never decreases.

use crate::dense::{dot, mgs_qr, Mat};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use itertools::Itertools;
use rayon::prelude::*;

/// A k-by-k orthogonal matrix.
#[derive(Debug, Clone)]
pub struct RotationMatrix {
    m: Mat,
}

impl RotationMatrix {
    /// Validates orthogonality (1e-10 per entry) and |det| = 1 (1e-8).
    pub fn new(m: Mat) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::InvalidArgument("rotation must be square".into()));
        }
        if m.orthonormality_error() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "matrix is not orthogonal (error {:.3e})",
                m.orthonormality_error()
            )));
        }
        // |det| from the QR diagonal; Q contributes a unit determinant.
        let (_, r) = mgs_qr(&m);
        let abs_det: f64 = (0..m.cols()).map(|i| r[(i, i)].abs()).product();
        if (abs_det - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "matrix determinant has modulus {abs_det}, expected 1"
            )));
        }
        Ok(RotationMatrix { m })
    }

    pub fn identity(k: usize) -> Self {
        RotationMatrix {
            m: Mat::identity(k),
        }
    }

    pub fn k(&self) -> usize {
        self.m.rows()
    }

    pub fn mat(&self) -> &Mat {
        &self.m
    }

    pub fn transpose(&self) -> Self {
        RotationMatrix {
            m: self.m.transpose(),
        }
    }

    /// Right-composition with a signed permutation: R P.
    pub fn compose(&self, p: &SignedPermutation) -> Self {
        RotationMatrix {
            m: p.apply_to_columns(&self.m),
        }
    }
}

/// An element of the sign-change / column-reordering class: the matrix P
/// with `P[perm[j], j] = signs[j]`, all other entries zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let k = perm.len();
        if signs.len() != k {
            return Err(Error::DimensionMismatch("perm/signs lengths differ".into()));
        }
        let mut seen = vec![false; k];
        for &p in &perm {
            if p >= k || seen[p] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(k: usize) -> Self {
        SignedPermutation {
            perm: (0..k).collect(),
            signs: vec![1; k],
        }
    }

    pub fn k(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn to_matrix(&self) -> Mat {
        let k = self.k();
        let mut m = Mat::zeros(k, k);
        for j in 0..k {
            m[(self.perm[j], j)] = self.signs[j] as f64;
        }
        m
    }

    /// M P: column j of the result is signs[j] times column perm[j] of M.
    pub fn apply_to_columns(&self, m: &Mat) -> Mat {
        let mut out = Mat::zeros(m.rows(), self.k());
        for j in 0..self.k() {
            let mut col = m.col(self.perm[j]);
            if self.signs[j] < 0 {
                for c in &mut col {
                    *c = -*c;
                }
            }
            out.set_col(j, &col);
        }
        out
    }
}

/// Evaluates the Varimax criterion exactly as written, both terms included.
pub fn varimax_objective(r: &RotationMatrix, u: &Mat) -> f64 {
    varimax_objective_raw(u, r.mat())
}

fn varimax_objective_raw(u: &Mat, r: &Mat) -> f64 {
    let g = u.matmul(r);
    objective_of_rotated(&g)
}

fn objective_of_rotated(g: &Mat) -> f64 {
    let n = g.rows() as f64;
    let mut total = 0.0;
    for l in 0..g.cols() {
        let mut s2 = 0.0;
        let mut s4 = 0.0;
        for i in 0..g.rows() {
            let x = g[(i, l)];
            let x2 = x * x;
            s2 += x2;
            s4 += x2 * x2;
        }
        total += s4 / n - (s2 / n).powi(2);
    }
    total
}

/// Tuning knobs for [`solve_varimax`].
#[derive(Debug, Clone)]
pub struct VarimaxParams {
    /// Relative objective-increase threshold that ends the sweep loop.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Total number of starts: the identity plus `restarts - 1` random
    /// orthogonal starts.
    pub restarts: usize,
    /// Seed for the random starts (unused when `restarts == 1`).
    pub seed: u64,
    /// Normalize rows to unit length before solving; the rotation is
    /// reported for the unnormalized input.
    pub kaiser_normalize: bool,
}

impl Default for VarimaxParams {
    fn default() -> Self {
        VarimaxParams {
            tol: 1e-10,
            max_sweeps: 100,
            restarts: 1,
            seed: 0,
            kaiser_normalize: false,
        }
    }
}

/// One solver run: the rotation, the recorded per-sweep objectives
/// (starting with the objective of the initial rotation), and the final
/// objective value.
#[derive(Debug, Clone)]
pub struct VarimaxSolve {
    pub rotation: RotationMatrix,
    pub sweep_objectives: Vec<f64>,
    pub objective: f64,
}

/// Maximizes the Varimax criterion by cyclic pairwise planar rotations.
pub fn solve_varimax(u: &Mat, params: &VarimaxParams) -> Result<RotationMatrix> {
    Ok(solve_varimax_detailed(u, params)?.rotation)
}

/// [`solve_varimax`] with the per-sweep objective trace exposed.
pub fn solve_varimax_detailed(u: &Mat, params: &VarimaxParams) -> Result<VarimaxSolve> {
    let (n, k) = (u.rows(), u.cols());
    if k < 1 || n < k {
        return Err(Error::InvalidArgument(format!(
            "need n >= k >= 1, got {n}x{k}"
        )));
    }
    if u.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input to varimax".into()));
    }
    if k == 1 {
        return Ok(VarimaxSolve {
            rotation: RotationMatrix::identity(1),
            sweep_objectives: vec![objective_of_rotated(u)],
            objective: objective_of_rotated(u),
        });
    }

    let work = if params.kaiser_normalize {
        let mut w = u.clone();
        for i in 0..n {
            let norm = dot(w.row(i), w.row(i)).sqrt();
            if norm > 0.0 {
                for x in w.row_mut(i) {
                    *x /= norm;
                }
            }
        }
        w
    } else {
        u.clone()
    };

    let restarts = params.restarts.max(1);
    let runs: Vec<(usize, VarimaxSolve)> = (0..restarts)
        .into_par_iter()
        .map(|idx| {
            let start = if idx == 0 {
                Mat::identity(k)
            } else {
                let mut rng = SplitMix64::derive(params.seed, idx as u64);
                let g = Mat::from_fn(k, k, |_, _| rng.next_normal());
                mgs_qr(&g).0
            };
            (
                idx,
                pairwise_ascent(&work, start, params.tol, params.max_sweeps),
            )
        })
        .collect();

    // Best objective wins; ties go to the lowest restart index.
    let mut best = None;
    for (idx, solve) in runs {
        let better = match &best {
            None => true,
            Some((_, b)) => {
                let b: &VarimaxSolve = b;
                solve.objective > b.objective
            }
        };
        if better {
            best = Some((idx, solve));
        }
    }
    let solve = best.expect("at least one restart").1;
    // If Kaiser normalization was used the trace refers to the normalized
    // problem; the rotation itself is what gets reported.
    Ok(solve)
}

fn pairwise_ascent(u: &Mat, start: Mat, tol: f64, max_sweeps: usize) -> VarimaxSolve {
    let n = u.rows();
    let k = u.cols();
    let nf = n as f64;
    let mut g: Vec<Vec<f64>> = u.matmul(&start).to_cols();
    let mut r: Vec<Vec<f64>> = start.to_cols();

    let objective = |cols: &Vec<Vec<f64>>| -> f64 {
        let mut total = 0.0;
        for col in cols {
            let mut s2 = 0.0;
            let mut s4 = 0.0;
            for &x in col {
                let x2 = x * x;
                s2 += x2;
                s4 += x2 * x2;
            }
            total += s4 / nf - (s2 / nf).powi(2);
        }
        total
    };

    let mut trace = vec![objective(&g)];
    for _sweep in 0..max_sweeps {
        for p in 0..k - 1 {
            for q in (p + 1)..k {
                // Kaiser's closed-form angle for the pair (p, q).
                let (mut a, mut b, mut c, mut dd) = (0.0, 0.0, 0.0, 0.0);
                for (&x, &y) in g[p].iter().zip(&g[q]) {
                    let ui = x * x - y * y;
                    let vi = 2.0 * x * y;
                    a += ui;
                    b += vi;
                    c += ui * ui - vi * vi;
                    dd += 2.0 * ui * vi;
                }
                let num = dd - 2.0 * a * b / nf;
                let den = c - (a * a - b * b) / nf;
                if num == 0.0 && den == 0.0 {
                    continue;
                }
                let phi = 0.25 * num.atan2(den);
                if phi.abs() < 1e-18 {
                    continue;
                }
                let (sn, cs) = phi.sin_cos();
                crate::dense::rotate_column_pair(&mut g, p, q, cs, sn);
                crate::dense::rotate_column_pair(&mut r, p, q, cs, sn);
            }
        }
        let obj = objective(&g);
        let prev = *trace.last().unwrap();
        trace.push(obj);
        if obj - prev <= tol * prev.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }

    let rotation =
        RotationMatrix::new(Mat::from_cols(k, r)).expect("planar rotations preserve orthogonality");
    let objective = *trace.last().unwrap();
    VarimaxSolve {
        rotation,
        sweep_objectives: trace,
        objective,
    }
}

/// Flips every column whose sample third central moment is negative.
/// Returns the adjusted matrix and the per-column signs.
pub fn apply_sign_convention(factors: &Mat) -> (Mat, Vec<i8>) {
    let mut out = factors.clone();
    let mut signs = Vec::with_capacity(factors.cols());
    for j in 0..factors.cols() {
        let col = factors.col(j);
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let m3 = col.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
        if m3 < 0.0 {
            out.scale_col(j, -1.0);
            signs.push(-1);
        } else {
            signs.push(1);
        }
    }
    (out, signs)
}

/// Signed permutation that sorts the columns of `g` by decreasing sum of
/// fourth powers and then fixes each column's sign by the skew rule.
pub fn ordering_sign_permutation(g: &Mat) -> SignedPermutation {
    let k = g.cols();
    let keys: Vec<f64> = (0..k)
        .map(|j| (0..g.rows()).map(|i| g[(i, j)].powi(4)).sum())
        .collect();
    let mut perm: Vec<usize> = (0..k).collect();
    perm.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap().then(a.cmp(&b)));
    let signs = perm
        .iter()
        .map(|&orig| {
            let col = g.col(orig);
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let m3 = col.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
            if m3 < 0.0 {
                -1
            } else {
                1
            }
        })
        .collect();
    SignedPermutation { perm, signs }
}

/// All 2^k k! signed permutations, identity first. Guarded at k <= 8.
pub fn enumerate_signed_permutations(k: usize) -> Result<Vec<SignedPermutation>> {
    if k > 8 {
        return Err(Error::SizeGuard(format!(
            "signed-permutation enumeration limited to k <= 8, got {k}"
        )));
    }
    let mut out = Vec::with_capacity((1usize << k) * (1..=k).product::<usize>());
    for perm in (0..k).permutations(k) {
        for mask in 0u32..(1u32 << k) {
            let signs = (0..k)
                .map(|j| if mask >> j & 1 == 1 { -1 } else { 1 })
                .collect();
            out.push(SignedPermutation {
                perm: perm.clone(),
                signs,
            });
        }
    }
    Ok(out)
}
