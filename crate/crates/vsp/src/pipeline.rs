//! The end-to-end decomposition: optional scaling, optional (implicit)
//! centering, truncated SVD, independent rotation of both singular-vector
//! blocks, deterministic column ordering and sign fixing, optional
//! recentering, optional rescaling.
//!
//! Output conventions: with singular triplets (U, D, V) of the processed
//! matrix and rotations R_u, R_v,
//!
//! ```text
//! Z = sqrt(n) U R_u,   Y = sqrt(d) V R_v,   B = R_u^T D R_v / sqrt(n d)
//! ```
//!
//! so Z B Y^T always reproduces U D V^T regardless of how the rotations
//! are permuted or sign-flipped, because the cosmetic signed permutations
//! are folded into R_u and R_v themselves.

use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::sparse::{
    build_operator, centering_stats_of_base, compute_scaling_stats, CenterMode, CenteringStats,
    ScalingStats, SparseMatrix,
};
use crate::svd::{truncated_svd, SvdResult, DEFAULT_OVERSAMPLE, DEFAULT_POWER_ITERS};
use crate::varimax::{ordering_sign_permutation, solve_varimax, RotationMatrix, VarimaxParams};

/// Relative threshold below which a singular value counts as zero for
/// recentering purposes.
const RANK_DEFICIENCY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct VspConfig {
    pub k: usize,
    pub center: bool,
    pub scale: bool,
    pub recenter: bool,
    pub rescale: bool,
    pub center_mode: CenterMode,
    pub seed: u64,
    pub oversample: usize,
    pub power_iters: usize,
    pub varimax_tol: f64,
    pub varimax_max_sweeps: usize,
    pub varimax_restarts: usize,
    pub kaiser_normalize: bool,
}

impl VspConfig {
    pub fn new(k: usize) -> Self {
        VspConfig {
            k,
            center: false,
            scale: false,
            recenter: false,
            rescale: false,
            center_mode: CenterMode::Full,
            seed: 0,
            oversample: DEFAULT_OVERSAMPLE,
            power_iters: DEFAULT_POWER_ITERS,
            varimax_tol: 1e-10,
            varimax_max_sweeps: 100,
            varimax_restarts: 1,
            kaiser_normalize: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.recenter && !self.center {
            return Err(Error::InvalidArgument(
                "recentering requires centering (recenter => center)".into(),
            ));
        }
        if self.rescale && !self.scale {
            return Err(Error::InvalidArgument(
                "rescaling requires scaling (rescale => scale)".into(),
            ));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Ok(())
    }

    fn varimax_params(&self, stream: u64) -> VarimaxParams {
        VarimaxParams {
            tol: self.varimax_tol,
            max_sweeps: self.varimax_max_sweeps,
            restarts: self.varimax_restarts,
            seed: SplitMix64::derive(self.seed, stream).next_u64(),
            kaiser_normalize: self.kaiser_normalize,
        }
    }
}

/// Everything the decomposition produces.
#[derive(Debug, Clone)]
pub struct VspResult {
    /// sqrt(n) U R_u, columns ordered by decreasing fourth-power mass and
    /// sign-fixed to nonnegative skew. Column norms are exactly sqrt(n).
    pub z_hat: Mat,
    /// sqrt(d) V R_v, same conventions.
    pub y_hat: Mat,
    /// R_u^T D R_v / sqrt(n d).
    pub b_hat: Mat,
    /// Estimated factor means (present when recentering was requested).
    pub mu_z: Option<Vec<f64>>,
    pub mu_y: Option<Vec<f64>>,
    pub singular_values: Vec<f64>,
    /// Final rotations, cosmetic signed permutation included.
    pub rot_u: RotationMatrix,
    pub rot_v: RotationMatrix,
    /// Statistics of the processed matrix, as used by the operator.
    pub centering: Option<CenteringStats>,
    pub scaling: Option<ScalingStats>,
    /// Degree-rescaled factors (present when rescaling was requested):
    /// rows of z_hat times sqrt(deg_r + tau_r), and the y side likewise.
    pub z_hat_rescaled: Option<Mat>,
    pub y_hat_rescaled: Option<Mat>,
    /// Unrotated left singular vectors, kept for diagnostics (localization
    /// is a property of the principal components, not the rotated factors).
    pub u_hat: Mat,
}

impl VspResult {
    pub fn k(&self) -> usize {
        self.singular_values.len()
    }

    /// Z B Y^T, which must coincide with the rank-k approximation of the
    /// processed input.
    pub fn rank_k_product(&self) -> Mat {
        self.z_hat
            .matmul(&self.b_hat)
            .matmul(&self.y_hat.transpose())
    }
}

/// Runs the full decomposition on a sparse matrix.
pub fn run_vsp(a: &SparseMatrix, config: &VspConfig) -> Result<VspResult> {
    config.validate()?;
    let (n, d) = (a.n_rows(), a.n_cols());
    if config.k > n.min(d) {
        return Err(Error::InvalidArgument(format!(
            "k = {} exceeds min(n, d) = {}",
            config.k,
            n.min(d)
        )));
    }

    let scaling = if config.scale {
        Some(compute_scaling_stats(a)?)
    } else {
        None
    };
    // With scaling on, the centering statistics describe the scaled matrix:
    // scaling happens first, centering applies to what the SVD actually sees.
    let centering = if config.center {
        Some(centering_stats_of_base(a, scaling.as_ref()))
    } else {
        None
    };
    let op = build_operator(a, scaling.clone(), centering.clone(), config.center_mode)?;

    let svd = truncated_svd(
        &op,
        config.k,
        config.seed,
        config.oversample,
        config.power_iters,
    )?;

    let (rot_u, rot_v) = rotate_both_sides(&svd, config)?;

    let sqrt_n = (n as f64).sqrt();
    let sqrt_d = (d as f64).sqrt();
    let z_hat = svd.u.matmul(rot_u.mat()).scale(sqrt_n);
    let y_hat = svd.v.matmul(rot_v.mat()).scale(sqrt_d);

    // B = R_u^T D R_v / sqrt(nd)
    let mut dr = rot_v.mat().clone();
    for (j, &s) in svd.singular_values.iter().enumerate() {
        // scale row j of R_v by sigma_j: (D R_v)[j, :]
        for c in 0..dr.cols() {
            let v = dr[(j, c)] * s;
            dr[(j, c)] = v;
        }
    }
    let b_hat = rot_u
        .mat()
        .transpose()
        .matmul(&dr)
        .scale(1.0 / (sqrt_n * sqrt_d));

    let (mu_z, mu_y) = if config.recenter {
        let stats = centering
            .as_ref()
            .expect("recenter => center was validated");
        let (mz, my) = recenter(
            &stats.mu_c,
            &svd.v,
            &svd.singular_values,
            &rot_u,
            &stats.mu_r,
            &svd.u,
            &rot_v,
        )?;
        (Some(mz), Some(my))
    } else {
        (None, None)
    };

    let (z_hat_rescaled, y_hat_rescaled) = if config.rescale {
        let s = scaling.as_ref().expect("rescale => scale was validated");
        let mut zr = z_hat.clone();
        for i in 0..n {
            let f = (s.deg_r[i] + s.tau_r).sqrt();
            for v in zr.row_mut(i) {
                *v *= f;
            }
        }
        let mut yr = y_hat.clone();
        for j in 0..d {
            let f = (s.deg_c[j] + s.tau_c).sqrt();
            for v in yr.row_mut(j) {
                *v *= f;
            }
        }
        (Some(zr), Some(yr))
    } else {
        (None, None)
    };

    Ok(VspResult {
        z_hat,
        y_hat,
        b_hat,
        mu_z,
        mu_y,
        singular_values: svd.singular_values,
        rot_u,
        rot_v,
        centering,
        scaling,
        z_hat_rescaled,
        y_hat_rescaled,
        u_hat: svd.u,
    })
}

fn rotate_both_sides(
    svd: &SvdResult,
    config: &VspConfig,
) -> Result<(RotationMatrix, RotationMatrix)> {
    let ru = solve_varimax(&svd.u, &config.varimax_params(1))?;
    let rv = solve_varimax(&svd.v, &config.varimax_params(2))?;
    // Fold the deterministic ordering and sign rules into the rotations so
    // every downstream quantity (B, mu_Z, mu_Y) stays coherent.
    let gu = svd.u.matmul(ru.mat());
    let ru = ru.compose(&ordering_sign_permutation(&gu));
    let gv = svd.v.matmul(rv.mat());
    let rv = rv.compose(&ordering_sign_permutation(&gv));
    Ok((ru, rv))
}

/// Factor-mean estimates from quantities the decomposition already has:
///
/// ```text
/// mu_Z = sqrt(n) mu_c V D^{-1} R_u,    mu_Y = sqrt(d) mu_r^T U D^{-1} R_v
/// ```
///
/// The rotations must be the final (ordered, sign-fixed) rotations applied
/// to Z and Y, so that Z + 1 mu_Z is coherent. Errors at rank deficiency.
pub fn recenter(
    mu_c: &[f64],
    v_hat: &Mat,
    singular_values: &[f64],
    rot_u: &RotationMatrix,
    mu_r: &[f64],
    u_hat: &Mat,
    rot_v: &RotationMatrix,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = singular_values.len();
    if v_hat.cols() != k || u_hat.cols() != k || rot_u.k() != k || rot_v.k() != k {
        return Err(Error::DimensionMismatch("recenter: k mismatch".into()));
    }
    if mu_c.len() != v_hat.rows() || mu_r.len() != u_hat.rows() {
        return Err(Error::DimensionMismatch(
            "recenter: mean-vector lengths".into(),
        ));
    }
    let top = singular_values.first().copied().unwrap_or(0.0);
    if singular_values
        .iter()
        .any(|&s| s <= 0.0 || s <= RANK_DEFICIENCY_RTOL * top)
    {
        return Err(Error::RankDeficient);
    }
    let n = u_hat.rows() as f64;
    let d = v_hat.rows() as f64;

    // t = mu_c V D^{-1} (length k), then mu_Z = sqrt(n) t R_u
    let mut t = vec![0.0; k];
    for (j, tj) in t.iter_mut().enumerate() {
        *tj = (0..v_hat.rows())
            .map(|w| mu_c[w] * v_hat[(w, j)])
            .sum::<f64>()
            / singular_values[j];
    }
    let mu_z: Vec<f64> = (0..k)
        .map(|j| n.sqrt() * (0..k).map(|l| t[l] * rot_u.mat()[(l, j)]).sum::<f64>())
        .collect();

    let mut s = vec![0.0; k];
    for (j, sj) in s.iter_mut().enumerate() {
        *sj = (0..u_hat.rows())
            .map(|i| mu_r[i] * u_hat[(i, j)])
            .sum::<f64>()
            / singular_values[j];
    }
    let mu_y: Vec<f64> = (0..k)
        .map(|j| d.sqrt() * (0..k).map(|l| s[l] * rot_v.mat()[(l, j)]).sum::<f64>())
        .collect();

    Ok((mu_z, mu_y))
}
