//! Exportable decomposition diagnostics: per-factor sample kurtosis, the
//! scree values, a norm-weighted row sample for pair plots, and the
//! per-component participation ratio that flags localized components.

use crate::dense::Mat;
use crate::models::sample_kurtosis;
use crate::rng::SplitMix64;

pub const DEFAULT_PAIR_SAMPLE: usize = 5000;

#[derive(Debug, Clone)]
pub struct DiagnosticsBundle {
    /// Sample kurtosis of each factor column; NaN flags a degenerate
    /// (constant) column rather than failing the whole bundle.
    pub factor_kurtosis: Vec<f64>,
    /// Singular values, for the scree plot.
    pub scree: Vec<f64>,
    /// Row indices of the pair-plot sample, ascending.
    pub pair_rows: Vec<usize>,
    /// The sampled factor rows, one per entry of `pair_rows`.
    pub pair_sample: Mat,
    /// Per-component participation ratio (sum u^2)^2 / (n sum u^4); values
    /// near 1/n indicate a component localized on a few rows.
    pub participation: Vec<f64>,
}

/// Assembles the bundle. The pair sample draws `min(pair_sample_size, n)`
/// rows without replacement with inclusion probability proportional to the
/// row l2 norm of the factors (uniform when all norms are zero), using the
/// weighted-key reservoir rule so the draw is one deterministic pass.
pub fn diagnostics(
    z_hat: &Mat,
    singular_values: &[f64],
    u_hat: &Mat,
    pair_sample_size: usize,
    seed: u64,
) -> DiagnosticsBundle {
    let n = z_hat.rows();
    let k = z_hat.cols();

    let factor_kurtosis: Vec<f64> = (0..k)
        .map(|j| sample_kurtosis(&z_hat.col(j)).unwrap_or(f64::NAN))
        .collect();

    let weights: Vec<f64> = (0..n)
        .map(|i| crate::dense::dot(z_hat.row(i), z_hat.row(i)).sqrt())
        .collect();
    let all_zero = weights.iter().all(|&w| w == 0.0);

    // weighted sampling without replacement: key_i = ln(u_i) / w_i, keep the
    // m largest keys (Efraimidis-Spirakis)
    let mut rng = SplitMix64::derive(seed, 0x64696167);
    let mut keyed: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let u = rng.next_f64().max(f64::MIN_POSITIVE);
            let w = if all_zero { 1.0 } else { weights[i] };
            let key = if w > 0.0 {
                u.ln() / w
            } else {
                f64::NEG_INFINITY
            };
            (key, i)
        })
        .collect();
    let m = pair_sample_size.min(n);
    keyed.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut pair_rows: Vec<usize> = keyed[..m].iter().map(|&(_, i)| i).collect();
    pair_rows.sort_unstable();
    let pair_sample = Mat::from_fn(m, k, |r, j| z_hat[(pair_rows[r], j)]);

    let participation: Vec<f64> = (0..u_hat.cols())
        .map(|j| {
            let mut s2 = 0.0;
            let mut s4 = 0.0;
            for i in 0..u_hat.rows() {
                let v = u_hat[(i, j)];
                s2 += v * v;
                s4 += v * v * v * v;
            }
            if s4 == 0.0 {
                f64::NAN
            } else {
                s2 * s2 / (u_hat.rows() as f64 * s4)
            }
        })
        .collect();

    DiagnosticsBundle {
        factor_kurtosis,
        scree: singular_values.to_vec(),
        pair_rows,
        pair_sample,
        participation,
    }
}
