//! Blockmodel generators: degree-corrected (and plain) stochastic
//! blockmodels, overlapping memberships, and mixed memberships. All of
//! them share the symmetric Bernoulli edge sampler: independent upper
//! triangle, mirrored, zero diagonal.

use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::models::dist::DistributionSpec;
use crate::models::moments::Density;
use crate::sparse::SparseMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Degree-corrected stochastic blockmodel. With a point-mass degree law
/// this is the plain stochastic blockmodel.
#[derive(Debug, Clone)]
pub struct DcSbmSpec {
    pub n: usize,
    pub k: usize,
    /// Block probabilities, summing to one.
    pub pi: Vec<f64>,
    /// k x k block connectivity with entries in [0, 1].
    pub b: Mat,
    /// Sparsity scale: the edge probability matrix is built from rho * B.
    pub rho: f64,
    /// Law of the raw degree parameters; rescaled internally so that
    /// E(Z_ij^2) = 1, i.e. E(theta_j^2) = 1 / pi_j.
    pub theta_dist: DistributionSpec,
}

impl DcSbmSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 {
            return Err(Error::InvalidArgument("n and k must be positive".into()));
        }
        if self.pi.len() != self.k {
            return Err(Error::DimensionMismatch("pi must have length k".into()));
        }
        if self.pi.iter().any(|&p| p <= 0.0) || (self.pi.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(
                "pi must be a positive probability vector".into(),
            ));
        }
        if self.b.rows() != self.k || self.b.cols() != self.k {
            return Err(Error::DimensionMismatch("B must be k x k".into()));
        }
        if self.b.data().iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidArgument(
                "B entries must lie in [0, 1]".into(),
            ));
        }
        if self.rho.is_nan() || self.rho <= 0.0 {
            return Err(Error::InvalidArgument("rho must be positive".into()));
        }
        if self.theta_dist.is_row_level() {
            return Err(Error::InvalidArgument("theta law must be scalar".into()));
        }
        let m = self.theta_dist.moments()?;
        if m.m1.is_nan() || m.m2.is_nan() || m.m1 <= 0.0 || m.m2 <= 0.0 {
            return Err(Error::InvalidArgument(
                "theta law must have positive mean and second moment".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SbmSample {
    /// Symmetric adjacency matrix, zero diagonal.
    pub a: SparseMatrix,
    /// Factor matrix Z whose rows encode the memberships.
    pub z: Mat,
    /// Density summary of the expectation matrix (diagonal zeroed), computed
    /// exactly during sampling.
    pub density: Density,
}

/// Samples multinomial memberships, rescaled degree parameters, and the
/// Bernoulli adjacency matrix. Errors if any edge probability exceeds 1.
pub fn generate_dcsbm(spec: &DcSbmSpec, seed: u64) -> Result<SbmSample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let membership = sample_memberships(spec.n, &spec.pi, &mut rng);
    let theta_m2 = spec.theta_dist.moments()?.m2;
    let mut z = Mat::zeros(spec.n, spec.k);
    let mut theta = vec![0.0; spec.n];
    for i in 0..spec.n {
        let c = membership[i];
        // divide by the analytic sqrt(pi_c * E theta^2) so E(Z_ic^2) = 1
        let raw = spec.theta_dist.sample(&mut rng)?;
        let scaled = raw / (spec.pi[c] * theta_m2).sqrt();
        theta[i] = scaled;
        z[(i, c)] = scaled;
    }
    let b_scaled = spec.b.scale(spec.rho);
    let (a, density) = sample_symmetric_bernoulli(spec.n, &mut rng, |i, j| {
        theta[i] * theta[j] * b_scaled[(membership[i], membership[j])]
    })?;
    Ok(SbmSample { a, z, density })
}

/// Overlapping blockmodel: Z_ij ~ Bernoulli(p_j) independently, edge
/// probabilities rho * z_i B z_j^T.
#[derive(Debug, Clone)]
pub struct OverlapSpec {
    pub n: usize,
    pub k: usize,
    pub p: Vec<f64>,
    pub b: Mat,
    pub rho: f64,
}

pub fn generate_overlapping(spec: &OverlapSpec, seed: u64) -> Result<SbmSample> {
    if spec.p.len() != spec.k {
        return Err(Error::DimensionMismatch("p must have length k".into()));
    }
    if spec.p.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidArgument(
            "membership probabilities outside [0, 1]".into(),
        ));
    }
    if spec.b.rows() != spec.k || spec.b.cols() != spec.k {
        return Err(Error::DimensionMismatch("B must be k x k".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = Mat::zeros(spec.n, spec.k);
    for i in 0..spec.n {
        for j in 0..spec.k {
            if rng.gen::<f64>() < spec.p[j] {
                z[(i, j)] = 1.0;
            }
        }
    }
    let (a, density) = edge_sample_from_factors(spec.n, &z, &spec.b, spec.rho, &mut rng)?;
    Ok(SbmSample { a, z, density })
}

/// Mixed-membership blockmodel: rows of Z drawn from Dirichlet(alpha).
#[derive(Debug, Clone)]
pub struct MixedMembershipSpec {
    pub n: usize,
    pub k: usize,
    pub alpha: Vec<f64>,
    pub b: Mat,
    pub rho: f64,
}

pub fn generate_mixed_membership(spec: &MixedMembershipSpec, seed: u64) -> Result<SbmSample> {
    if spec.alpha.len() != spec.k {
        return Err(Error::DimensionMismatch("alpha must have length k".into()));
    }
    if spec.b.rows() != spec.k || spec.b.cols() != spec.k {
        return Err(Error::DimensionMismatch("B must be k x k".into()));
    }
    let law = DistributionSpec::dirichlet(spec.alpha.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = Mat::zeros(spec.n, spec.k);
    for i in 0..spec.n {
        let row = law.sample_row(&mut rng)?;
        for j in 0..spec.k {
            z[(i, j)] = row[j];
        }
    }
    let (a, density) = edge_sample_from_factors(spec.n, &z, &spec.b, spec.rho, &mut rng)?;
    Ok(SbmSample { a, z, density })
}

fn sample_memberships(n: usize, pi: &[f64], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut cum = Vec::with_capacity(pi.len());
    let mut acc = 0.0;
    for &p in pi {
        acc += p;
        cum.push(acc);
    }
    (0..n)
        .map(|_| {
            let u = rng.gen::<f64>();
            cum.iter().position(|&c| u < c).unwrap_or(pi.len() - 1)
        })
        .collect()
}

fn edge_sample_from_factors(
    n: usize,
    z: &Mat,
    b: &Mat,
    rho: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(SparseMatrix, Density)> {
    let bz = z.matmul(&b.scale(rho)); // n x k, row i = z_i (rho B)
    sample_symmetric_bernoulli(n, rng, |i, j| crate::dense::dot(bz.row(i), z.row(j)))
}

/// Draws the upper triangle independently, mirrors it, and zeroes the
/// diagonal. The probability callback is evaluated once per unordered
/// pair; the exact density summary of the expectation matrix falls out of
/// the same loop.
fn sample_symmetric_bernoulli(
    n: usize,
    rng: &mut ChaCha8Rng,
    prob: impl Fn(usize, usize) -> f64,
) -> Result<(SparseMatrix, Density)> {
    let mut triplets = Vec::new();
    let mut total = 0.0;
    let mut max_p = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let p = prob(i, j);
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::ProbabilityOverflow { i, j, p });
            }
            total += 2.0 * p;
            max_p = max_p.max(p);
            if rng.gen::<f64>() < p {
                triplets.push((i, j, 1.0));
                triplets.push((j, i, 1.0));
            }
        }
    }
    let a = SparseMatrix::from_triplets(n, n, triplets)?;
    let nd = (n * n) as f64;
    let rho_mean = if nd > 0.0 { total / nd } else { 0.0 };
    Ok((
        a,
        Density {
            rho: rho_mean,
            rho_bar: max_p,
            delta: n as f64 * rho_mean,
        },
    ))
}
