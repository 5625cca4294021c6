//! Generator for the general factor model: independent latent factor
//! matrices Z (n x k) and Y (d x k), expectation rho * Z B Y^T, and
//! entrywise-independent observation noise around that expectation.

use crate::dense::{jacobi_svd, Mat};
use crate::error::{Error, Result};
use crate::models::dist::DistributionSpec;
use crate::sparse::{RowBuilder, SparseMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

/// Observation law for each entry given its mean.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseFamily {
    /// mean + sigma * N(0,1); sigma = 0 reproduces the expectation exactly.
    Gaussian {
        sigma: f64,
    },
    Poisson,
    Bernoulli,
}

#[derive(Debug, Clone)]
pub struct FactorModelSpec {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    /// k x k mixing matrix, full rank.
    pub b: Mat,
    /// Per-column laws of Z (length k, scalar laws).
    pub z_dists: Vec<DistributionSpec>,
    /// Per-column laws of Y (length k, scalar laws).
    pub y_dists: Vec<DistributionSpec>,
    pub noise: NoiseFamily,
    /// Global expectation scale rho.
    pub rho: f64,
}

impl FactorModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 || self.k == 0 {
            return Err(Error::InvalidArgument("n, d, k must be positive".into()));
        }
        if self.b.rows() != self.k || self.b.cols() != self.k {
            return Err(Error::DimensionMismatch("B must be k x k".into()));
        }
        if self.z_dists.len() != self.k || self.y_dists.len() != self.k {
            return Err(Error::DimensionMismatch(
                "need one column law per factor".into(),
            ));
        }
        for d in self.z_dists.iter().chain(&self.y_dists) {
            if d.is_row_level() {
                return Err(Error::InvalidArgument(
                    "factor model columns need scalar laws".into(),
                ));
            }
        }
        if self.rho.is_nan() || self.rho <= 0.0 {
            return Err(Error::InvalidArgument("rho must be positive".into()));
        }
        let (_, sigma, _) = jacobi_svd(&self.b);
        if sigma[self.k - 1] <= 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "B is rank deficient (sigma_min = {:.3e})",
                sigma[self.k - 1]
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FactorSample {
    pub a: SparseMatrix,
    pub z: Mat,
    pub y: Mat,
}

/// Samples Z and Y column laws, forms the expectation rho Z B Y^T, and
/// draws every observation independently from the noise family. Zero
/// observations are dropped from sparse storage.
pub fn generate_factor_model(spec: &FactorModelSpec, seed: u64) -> Result<FactorSample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = sample_columns(spec.n, &spec.z_dists, &mut rng)?;
    let y = sample_columns(spec.d, &spec.y_dists, &mut rng)?;

    let b_scaled = spec.b.scale(spec.rho);
    let mut builder = RowBuilder::new(spec.d);
    let mut w = vec![0.0; spec.k];
    for i in 0..spec.n {
        // w = z_i (rho B)
        for (l, wl) in w.iter_mut().enumerate() {
            *wl = (0..spec.k).map(|t| z[(i, t)] * b_scaled[(t, l)]).sum();
        }
        let row = (0..spec.d).filter_map(|j| {
            let mean = crate::dense::dot(&w, y.row(j));
            match sample_noise(&spec.noise, mean, i, j, &mut rng) {
                Ok(v) if v != 0.0 => Some(Ok((j, v))),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            }
        });
        // collect so an error can interrupt the builder cleanly
        let row: Result<Vec<(usize, f64)>> = row.collect();
        builder.push_row(row?.into_iter());
    }
    Ok(FactorSample {
        a: builder.finish()?,
        z,
        y,
    })
}

fn sample_columns(rows: usize, dists: &[DistributionSpec], rng: &mut ChaCha8Rng) -> Result<Mat> {
    let mut m = Mat::zeros(rows, dists.len());
    for i in 0..rows {
        for (j, d) in dists.iter().enumerate() {
            m[(i, j)] = d.sample(rng)?;
        }
    }
    Ok(m)
}

fn sample_noise(
    noise: &NoiseFamily,
    mean: f64,
    i: usize,
    j: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    match noise {
        NoiseFamily::Gaussian { sigma } => {
            if *sigma == 0.0 {
                Ok(mean)
            } else {
                Ok(mean + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal))
            }
        }
        NoiseFamily::Poisson => {
            if mean < 0.0 {
                Err(Error::InvalidArgument(format!(
                    "poisson mean {mean} negative at ({i}, {j})"
                )))
            } else if mean == 0.0 {
                Ok(0.0)
            } else {
                let d = rand_distr::Poisson::new(mean)
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?;
                Ok(d.sample(rng))
            }
        }
        NoiseFamily::Bernoulli => {
            if mean < 0.0 {
                Err(Error::InvalidArgument(format!(
                    "bernoulli mean {mean} negative at ({i}, {j})"
                )))
            } else if mean > 1.0 {
                Err(Error::ProbabilityOverflow { i, j, p: mean })
            } else {
                Ok(if rng.gen::<f64>() < mean { 1.0 } else { 0.0 })
            }
        }
    }
}
