//! Topic-model generator with Gamma-overdispersed document intensities.
//!
//! Construction: X_ij ~ Gamma(alpha_j, s) independently, xi_i = sum_j X_ij,
//! Z_i = X_i / xi_i (so Z_i ~ Dirichlet(alpha), independent of xi_i), and
//! counts A_ij ~ Poisson([X beta^T]_ij). The identifiable factor matrix is
//! Z* = X Sigma^{-1/2} with Sigma_jj = alpha_j s^2, which has independent
//! unit-variance leptokurtic entries.

use crate::dense::{jacobi_svd, Mat};
use crate::error::{Error, Result};
use crate::sparse::{RowBuilder, SparseMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

#[derive(Debug, Clone)]
pub struct LdaSpec {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    /// Topic concentration; also the Gamma shapes of the intensities.
    pub alpha: Vec<f64>,
    /// Gamma scale: document lengths are negative binomial with this
    /// overdispersion scale.
    pub s: f64,
    /// d x k column-stochastic topic matrix.
    pub beta: Mat,
    sigma_min_beta: f64,
}

impl LdaSpec {
    pub fn new(n: usize, d: usize, k: usize, alpha: Vec<f64>, s: f64, beta: Mat) -> Result<Self> {
        if n == 0 || d == 0 || k == 0 {
            return Err(Error::InvalidArgument("n, d, k must be positive".into()));
        }
        if alpha.len() != k {
            return Err(Error::DimensionMismatch("alpha must have length k".into()));
        }
        if alpha.iter().any(|&a| a <= 0.0) {
            return Err(Error::InvalidArgument(
                "alpha entries must be positive".into(),
            ));
        }
        if s.is_nan() || s <= 0.0 {
            return Err(Error::InvalidArgument("scale s must be positive".into()));
        }
        if beta.rows() != d || beta.cols() != k {
            return Err(Error::DimensionMismatch("beta must be d x k".into()));
        }
        for j in 0..k {
            let col = beta.col(j);
            if col.iter().any(|&v| v < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "beta column {j} has negative entries"
                )));
            }
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "beta column {j} sums to {sum}, expected 1"
                )));
            }
        }
        let (_, sv, _) = jacobi_svd(&beta);
        let sigma_min_beta = sv[k - 1];
        Ok(LdaSpec {
            n,
            d,
            k,
            alpha,
            s,
            beta,
            sigma_min_beta,
        })
    }

    /// Smallest singular value of beta, recorded at construction.
    pub fn sigma_min_beta(&self) -> f64 {
        self.sigma_min_beta
    }

    /// Disjoint block topics: topic j puts `weight` of its mass uniformly
    /// on its own block of `width` words and spreads the rest uniformly
    /// over the whole vocabulary.
    pub fn block_topics(d: usize, k: usize, width: usize, weight: f64) -> Result<Mat> {
        if width * k > d {
            return Err(Error::InvalidArgument(format!(
                "{k} blocks of width {width} do not fit in {d} words"
            )));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidArgument(
                "block weight must lie in [0, 1]".into(),
            ));
        }
        let mut beta = Mat::zeros(d, k);
        for j in 0..k {
            for w in 0..d {
                beta[(w, j)] = (1.0 - weight) / d as f64;
            }
            for w in (j * width)..((j + 1) * width) {
                beta[(w, j)] += weight / width as f64;
            }
        }
        Ok(beta)
    }
}

#[derive(Debug, Clone)]
pub struct LdaSample {
    /// Document-term count matrix.
    pub a: SparseMatrix,
    /// Identifiable factors Z* = X Sigma^{-1/2} (unit-variance Gamma columns).
    pub z_star: Mat,
    /// Document intensities xi_i = sum_j X_ij.
    pub xi: Vec<f64>,
    /// Simplex topic weights Z_i = X_i / xi_i.
    pub z: Mat,
}

pub fn generate_lda(spec: &LdaSpec, seed: u64) -> Result<LdaSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gammas: Vec<rand_distr::Gamma<f64>> = spec
        .alpha
        .iter()
        .map(|&a| {
            rand_distr::Gamma::new(a, spec.s).map_err(|e| Error::InvalidArgument(e.to_string()))
        })
        .collect::<Result<_>>()?;

    let mut x = Mat::zeros(spec.n, spec.k);
    let mut xi = vec![0.0; spec.n];
    for i in 0..spec.n {
        let mut total = 0.0;
        for j in 0..spec.k {
            let v = gammas[j].sample(&mut rng);
            x[(i, j)] = v;
            total += v;
        }
        xi[i] = total;
    }

    let mut z = Mat::zeros(spec.n, spec.k);
    let mut z_star = Mat::zeros(spec.n, spec.k);
    for i in 0..spec.n {
        for j in 0..spec.k {
            z[(i, j)] = if xi[i] > 0.0 { x[(i, j)] / xi[i] } else { 0.0 };
            z_star[(i, j)] = x[(i, j)] / (spec.alpha[j] * spec.s * spec.s).sqrt();
        }
    }

    let mut builder = RowBuilder::new(spec.d);
    for i in 0..spec.n {
        let intensities: Vec<f64> = (0..spec.d)
            .map(|w| crate::dense::dot(x.row(i), spec.beta.row(w)))
            .collect();
        let row: Result<Vec<(usize, f64)>> = intensities
            .iter()
            .enumerate()
            .filter_map(|(w, &lam)| {
                if lam == 0.0 {
                    return None;
                }
                if lam < 0.0 {
                    return Some(Err(Error::InvalidArgument(format!(
                        "negative Poisson intensity at ({i}, {w})"
                    ))));
                }
                match rand_distr::Poisson::new(lam) {
                    Ok(d) => {
                        let c: f64 = d.sample(&mut rng);
                        if c > 0.0 {
                            Some(Ok((w, c)))
                        } else {
                            None
                        }
                    }
                    Err(e) => Some(Err(Error::InvalidArgument(e.to_string()))),
                }
            })
            .collect();
        builder.push_row(row?.into_iter());
    }
    Ok(LdaSample {
        a: builder.finish()?,
        z_star,
        xi,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::moments::sample_kurtosis;

    fn spec() -> LdaSpec {
        let beta = LdaSpec::block_topics(40, 2, 15, 1.0).unwrap();
        LdaSpec::new(400, 40, 2, vec![0.5, 0.5], 10.0, beta).unwrap()
    }

    #[test]
    fn row_sums_are_overdispersed() {
        // N_i is negative binomial: var/mean = 1 + s
        let sp = spec();
        let sample = generate_lda(&sp, 17).unwrap();
        let counts = sample.a.row_sums();
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<f64>() / n;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n;
        let ratio = var / mean;
        // loose 3-SE band around 1 + s for the dispersion ratio
        assert!(
            (ratio - (1.0 + sp.s)).abs() < 0.35 * (1.0 + sp.s),
            "dispersion ratio {ratio}, expected about {}",
            1.0 + sp.s
        );
    }

    #[test]
    fn z_star_columns_unit_variance() {
        let sp = spec();
        let sample = generate_lda(&sp, 3).unwrap();
        for j in 0..sp.k {
            let col = sample.z_star.col(j);
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            // 3 SE for the variance of a Gamma(0.5) sample of size 400
            assert!((var - 1.0).abs() < 0.5, "column {j} variance {var}");
        }
    }

    #[test]
    fn gamma_factors_leptokurtic() {
        // analytic Gamma kurtosis 3 + 6/alpha, checked on the sample
        let sp = spec();
        let sample = generate_lda(&sp, 23).unwrap();
        let k = sample_kurtosis(&sample.z_star.col(0)).unwrap();
        assert!(k > 3.0, "sample kurtosis {k}");
    }

    #[test]
    fn xi_matches_row_sums_of_x() {
        let sp = spec();
        let sample = generate_lda(&sp, 5).unwrap();
        for i in 0..sp.n {
            let from_z: f64 = sample.z.row(i).iter().sum();
            assert!((from_z - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn block_topics_column_stochastic() {
        let beta = LdaSpec::block_topics(50, 3, 10, 0.8).unwrap();
        for j in 0..3 {
            let sum: f64 = beta.col(j).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        assert!(LdaSpec::block_topics(20, 3, 10, 1.0).is_err());
    }
}
