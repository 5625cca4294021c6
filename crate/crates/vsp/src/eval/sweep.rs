//! Convergence sweeps: generate a model at increasing sizes, run the
//! decomposition the way the matching theory prescribes (centering off for
//! hard-membership blockmodels, centering plus recentering for factor
//! models), align to the truth, and summarize how the row-wise error
//! shrinks with the expected degree.

use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::eval::{align_factors, AlignMode};
use crate::models::{generate_dcsbm, generate_factor_model, DcSbmSpec, FactorModelSpec};
use crate::pipeline::{run_vsp, VspConfig};
use rayon::prelude::*;

/// A model family with a size knob.
#[derive(Debug, Clone)]
pub enum SweepFamily {
    /// Blockmodel: estimated without centering, truth is Z itself.
    DcSbm(DcSbmSpec),
    /// Factor model: estimated with centering and recentering, truth is Z;
    /// d scales proportionally with n.
    Factor(FactorModelSpec),
    /// Deterministic equal blocks, noiseless observation: Z and Y are
    /// cyclic one-hot matrices with entries sqrt(k) (so Z^T Z = n I
    /// exactly) and A = rho Z B Y^T. Estimation is exact up to floating
    /// point, which pins the numerical floor of the whole pipeline.
    PlantedBlocks {
        k: usize,
        b: Mat,
        rho: f64,
        /// d = ceil(d_ratio * n).
        d_ratio: f64,
    },
}

impl SweepFamily {
    fn k(&self) -> usize {
        match self {
            SweepFamily::DcSbm(s) => s.k,
            SweepFamily::Factor(s) => s.k,
            SweepFamily::PlantedBlocks { k, .. } => *k,
        }
    }

    /// Runs one cell: generate at `size`, decompose, align, report
    /// (realized expected degree, row-wise error).
    fn run_cell(&self, size: usize, seed: u64, config: &VspConfig) -> Result<(f64, f64)> {
        match self {
            SweepFamily::DcSbm(base) => {
                let mut spec = base.clone();
                spec.n = size;
                let sample = generate_dcsbm(&spec, seed)?;
                let mut cfg = config.clone();
                cfg.center = false;
                cfg.recenter = false;
                cfg.seed = seed;
                let r = run_vsp(&sample.a, &cfg)?;
                let a = align_factors(&r.z_hat, &sample.z, AlignMode::Exact)?;
                Ok((sample.density.delta, a.err_two_inf))
            }
            SweepFamily::Factor(base) => {
                let mut spec = base.clone();
                let scale = size as f64 / base.n as f64;
                spec.n = size;
                spec.d = ((base.d as f64 * scale).round() as usize).max(spec.k);
                let sample = generate_factor_model(&spec, seed)?;
                let mut cfg = config.clone();
                cfg.center = true;
                cfg.recenter = true;
                cfg.seed = seed;
                let r = run_vsp(&sample.a, &cfg)?;
                // recentered estimate against the uncentered truth
                let mu = r.mu_z.as_ref().expect("recenter on");
                let mut est = r.z_hat.clone();
                for i in 0..est.rows() {
                    for j in 0..est.cols() {
                        est[(i, j)] += mu[j];
                    }
                }
                let a = align_factors(&est, &sample.z, AlignMode::Exact)?;
                // expected degree of the model expectation rho Z B Y^T
                let expectation = sample
                    .z
                    .matmul(&spec.b.scale(spec.rho))
                    .matmul(&sample.y.transpose());
                let delta = crate::models::compute_density_dense(&expectation).delta;
                Ok((delta, a.err_two_inf))
            }
            SweepFamily::PlantedBlocks { k, b, rho, d_ratio } => {
                let k = *k;
                // round to exact multiples of k so Z^T Z = n I holds exactly
                let n = size.div_ceil(k) * k;
                let d = (((*d_ratio * n as f64).ceil() as usize).max(k)).div_ceil(k) * k;
                let sqrt_k = (k as f64).sqrt();
                let z = Mat::from_fn(n, k, |i, j| if i % k == j { sqrt_k } else { 0.0 });
                let y = Mat::from_fn(d, k, |i, j| if i % k == j { sqrt_k } else { 0.0 });
                let dense = z.matmul(&b.scale(*rho)).matmul(&y.transpose());
                let mut trips = Vec::with_capacity(n * d / k);
                for i in 0..n {
                    for j in 0..d {
                        if dense[(i, j)] != 0.0 {
                            trips.push((i, j, dense[(i, j)]));
                        }
                    }
                }
                let a = crate::sparse::SparseMatrix::from_triplets(n, d, trips)?;
                let mut cfg = config.clone();
                cfg.center = false;
                cfg.recenter = false;
                cfg.seed = seed;
                let r = run_vsp(&a, &cfg)?;
                let al = align_factors(&r.z_hat, &z, AlignMode::Exact)?;
                let delta = crate::models::compute_density_dense(&dense).delta;
                Ok((delta, al.err_two_inf))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub size: usize,
    pub seed: u64,
    pub delta: f64,
    pub err_two_inf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummaryRow {
    pub size: usize,
    pub delta_median: f64,
    pub err_median: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// One row per (size, seed), ordered by (size, seed).
    pub cells: Vec<SweepCell>,
    /// One row per size with seed-medians, ordered by size.
    pub summary: Vec<SweepSummaryRow>,
    /// Least-squares slope of log(err_median) against log(delta_median).
    pub log_log_slope: f64,
}

impl SweepResult {
    /// Writes the per-cell table as `size,delta,seed,err` CSV.
    pub fn write_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        use std::io::Write;
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        for c in &self.cells {
            writeln!(
                w,
                "{},{},{},{}",
                c.size,
                crate::io::fmt_f64(c.delta),
                c.seed,
                crate::io::fmt_f64(c.err_two_inf)
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs every (size, seed) cell, in parallel; both inputs need at least
/// three entries for the slope to mean anything.
pub fn convergence_sweep(
    family: &SweepFamily,
    sizes: &[usize],
    seeds: &[u64],
    config: &VspConfig,
) -> Result<SweepResult> {
    if sizes.len() < 3 || seeds.len() < 3 {
        return Err(Error::InvalidArgument(
            "convergence sweep needs at least 3 sizes and 3 seeds".into(),
        ));
    }
    if config.k != family.k() {
        return Err(Error::DimensionMismatch(
            "config k does not match the model family".into(),
        ));
    }
    let grid: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let cells: Result<Vec<SweepCell>> = grid
        .par_iter()
        .map(|&(size, seed)| {
            let (delta, err_two_inf) = family.run_cell(size, seed, config)?;
            Ok(SweepCell {
                size,
                seed,
                delta,
                err_two_inf,
            })
        })
        .collect();
    let mut cells = cells?;
    cells.sort_by_key(|c| (c.size, c.seed));

    let mut summary = Vec::with_capacity(sizes.len());
    let mut sorted_sizes = sizes.to_vec();
    sorted_sizes.sort_unstable();
    sorted_sizes.dedup();
    for &size in &sorted_sizes {
        let deltas: Vec<f64> = cells
            .iter()
            .filter(|c| c.size == size)
            .map(|c| c.delta)
            .collect();
        let errs: Vec<f64> = cells
            .iter()
            .filter(|c| c.size == size)
            .map(|c| c.err_two_inf)
            .collect();
        summary.push(SweepSummaryRow {
            size,
            delta_median: median(&deltas),
            err_median: median(&errs),
        });
    }

    let xs: Vec<f64> = summary.iter().map(|r| r.delta_median.ln()).collect();
    let ys: Vec<f64> = summary
        .iter()
        .map(|r| r.err_median.max(1e-300).ln())
        .collect();
    let log_log_slope = least_squares_slope(&xs, &ys);

    Ok(SweepResult {
        cells,
        summary,
        log_log_slope,
    })
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{DistributionSpec, NoiseFamily};

    #[test]
    fn sweep_requires_enough_cells() {
        let spec = DcSbmSpec {
            n: 100,
            k: 2,
            pi: vec![0.5, 0.5],
            b: Mat::identity(2),
            rho: 0.05,
            theta_dist: DistributionSpec::point_mass(1.0).unwrap(),
        };
        let fam = SweepFamily::DcSbm(spec);
        let cfg = VspConfig::new(2);
        assert!(convergence_sweep(&fam, &[100, 200], &[0, 1, 2], &cfg).is_err());
        assert!(convergence_sweep(&fam, &[100, 200, 300], &[0, 1], &cfg).is_err());
    }

    #[test]
    fn noiseless_planted_family_sits_at_numerical_floor() {
        let fam = SweepFamily::PlantedBlocks {
            k: 3,
            b: Mat::from_rows(vec![
                vec![1.0, 0.1, 0.0],
                vec![0.1, 0.8, 0.1],
                vec![0.0, 0.1, 0.6],
            ])
            .unwrap(),
            rho: 0.5,
            d_ratio: 0.8,
        };
        let cfg = VspConfig::new(3);
        let r = convergence_sweep(&fam, &[60, 120, 180], &[0, 1, 2], &cfg).unwrap();
        assert_eq!(r.cells.len(), 9);
        for row in &r.summary {
            assert!(
                row.err_median < 1e-6,
                "size {} error {}",
                row.size,
                row.err_median
            );
        }
    }

    #[test]
    fn noisy_factor_family_runs_and_orders_cells() {
        let spec = FactorModelSpec {
            n: 80,
            d: 60,
            k: 2,
            b: Mat::from_rows(vec![vec![1.0, 0.1], vec![0.1, 0.8]]).unwrap(),
            z_dists: vec![DistributionSpec::exponential(1.0).unwrap(); 2],
            y_dists: vec![DistributionSpec::uniform(0.0, 3.4641016151377544).unwrap(); 2],
            noise: NoiseFamily::Gaussian { sigma: 0.05 },
            rho: 1.0,
        };
        let fam = SweepFamily::Factor(spec);
        let mut cfg = VspConfig::new(2);
        cfg.center = true;
        cfg.recenter = true;
        let r = convergence_sweep(&fam, &[80, 120, 160], &[0, 1, 2], &cfg).unwrap();
        assert_eq!(r.cells.len(), 9);
        // ordered by (size, seed)
        for w in r.cells.windows(2) {
            assert!((w[0].size, w[0].seed) < (w[1].size, w[1].seed));
        }
        assert_eq!(r.summary.len(), 3);
    }
}
