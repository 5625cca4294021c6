//! Kurtosis machinery: analytic kurtosis of the model laws, the
//! hard-sparsity and soft-sparsity compositions, sample kurtosis, and the
//! density summaries (mean / max / expected degree) of a matrix.

use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::models::dist::{DistributionSpec, RawMoments};
use crate::sparse::SparseMatrix;

/// Kurtosis of a scalar law from its stored raw moments.
pub fn analytic_kurtosis(dist: &DistributionSpec) -> Result<f64> {
    dist.moments()?.kurtosis()
}

/// Kurtosis of component `j` of a (possibly row-level) law.
pub fn analytic_kurtosis_component(dist: &DistributionSpec, j: usize) -> Result<f64> {
    dist.component_moments(j)?.kurtosis()
}

/// Kurtosis of X = S * B with B ~ Bernoulli(p) independent of S, whose raw
/// moments compose as E X^j = p E S^j.
#[derive(Debug, Clone, Copy)]
pub struct SparseKurtosis {
    pub kappa: f64,
    /// kappa > 3: the law is identifiable by the rotation criterion.
    pub leptokurtic: bool,
}

pub fn kurtosis_of_sparse(p: f64, s_moments: &RawMoments) -> Result<SparseKurtosis> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} outside (0, 1)")));
    }
    let x = RawMoments {
        m1: p * s_moments.m1,
        m2: p * s_moments.m2,
        m3: p * s_moments.m3,
        m4: p * s_moments.m4,
    };
    let kappa = x.kurtosis().map_err(|_| {
        Error::DegenerateDistribution("S is almost surely zero; X = SB degenerate".into())
    })?;
    Ok(SparseKurtosis {
        kappa,
        leptokurtic: kappa > 3.0,
    })
}

/// Kurtosis of X + W for independent X, W given their central moments
/// (eta_1..eta_4 each). Requires the caller to have rescaled X to unit
/// variance. The flag reports whether the sufficient condition
/// "eta_{w,2} < eps and eta_{x,4} >= 3 (1 + eps)^2 for some eps" holds,
/// which already guarantees kappa > 3.
#[derive(Debug, Clone, Copy)]
pub struct SumKurtosis {
    pub kappa: f64,
    pub hypothesis_satisfied: bool,
}

pub fn kurtosis_of_sum(x_central: [f64; 4], w_central: [f64; 4]) -> Result<SumKurtosis> {
    let [x1, x2, _x3, x4] = x_central;
    let [w1, w2, _w3, w4] = w_central;
    if x1.abs() > 1e-12 || w1.abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "first central moments must be zero".into(),
        ));
    }
    if (x2 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "eta_x2 must equal 1 (caller rescales), got {x2}"
        )));
    }
    if w2 < 0.0 || w4 < w2 * w2 - 1e-12 || x4 < 1.0 - 1e-12 {
        return Err(Error::InvalidArgument(
            "central moments violate eta4 >= eta2^2".into(),
        ));
    }
    let eta2 = 1.0 + w2;
    let eta4 = x4 + 6.0 * w2 + w4;
    let kappa = eta4 / (eta2 * eta2);
    // eps can be taken arbitrarily close to eta_{w,2} from above, so the
    // condition is satisfiable exactly when eta_{x,4} > 3 (1 + eta_{w,2})^2.
    let hypothesis_satisfied = x4 > 3.0 * (1.0 + w2).powi(2);
    Ok(SumKurtosis {
        kappa,
        hypothesis_satisfied,
    })
}

/// Sample kurtosis m4 / m2^2 with uncorrected central sample moments.
pub fn sample_kurtosis(x: &[f64]) -> Result<f64> {
    if x.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "sample kurtosis needs at least 4 observations, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for &v in x {
        let c = v - mean;
        let c2 = c * c;
        m2 += c2;
        m4 += c2 * c2;
    }
    m2 /= n;
    m4 /= n;
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if m2 <= 1e-28 * scale * scale {
        return Err(Error::DegenerateDistribution(
            "sample kurtosis undefined for a constant vector".into(),
        ));
    }
    Ok(m4 / (m2 * m2))
}

/// Grand mean, max absolute entry, and expected-degree summary of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Density {
    /// Grand mean of all n*d entries.
    pub rho: f64,
    /// Maximum absolute entry.
    pub rho_bar: f64,
    /// n_rows * rho.
    pub delta: f64,
}

pub fn compute_density(a: &SparseMatrix) -> Density {
    let nd = (a.n_rows() * a.n_cols()) as f64;
    let rho = if nd > 0.0 { a.sum() / nd } else { 0.0 };
    Density {
        rho,
        rho_bar: a.max_abs(),
        delta: a.n_rows() as f64 * rho,
    }
}

/// [`compute_density`] for a dense expectation matrix.
pub fn compute_density_dense(m: &Mat) -> Density {
    let nd = (m.rows() * m.cols()) as f64;
    let rho = if nd > 0.0 {
        m.data().iter().sum::<f64>() / nd
    } else {
        0.0
    };
    Density {
        rho,
        rho_bar: m.max_abs(),
        delta: m.rows() as f64 * rho,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bernoulli_kurtosis_formula() {
        // kappa = (1 - 3 p q) / (p q): Bernoulli is S = 1 hard sparsity
        let s = DistributionSpec::point_mass(1.0)
            .unwrap()
            .moments()
            .unwrap();
        let k = kurtosis_of_sparse(0.1, &s).unwrap();
        assert_abs_diff_eq!(k.kappa, (1.0 - 0.27) / 0.09, epsilon = 1e-12);
        assert!(k.leptokurtic);
    }

    #[test]
    fn bernoulli_boundary_exactly_three() {
        let s = DistributionSpec::point_mass(1.0)
            .unwrap()
            .moments()
            .unwrap();
        for p in [0.5 + 1.0 / 12f64.sqrt(), 0.5 - 1.0 / 12f64.sqrt()] {
            let k = kurtosis_of_sparse(p, &s).unwrap();
            assert_abs_diff_eq!(k.kappa, 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn large_p_bernoulli_still_leptokurtic() {
        // p = 5/6: pq = 5/36 < 1/6, so kappa = (1 - 15/36)/(5/36) = 4.2 > 3.
        // The hard-sparsity threshold is one-sided; this point lies outside
        // the theorem's range yet the formula still lands above 3.
        let s = DistributionSpec::point_mass(1.0)
            .unwrap()
            .moments()
            .unwrap();
        let k = kurtosis_of_sparse(5.0 / 6.0, &s).unwrap();
        assert_abs_diff_eq!(k.kappa, 4.2, epsilon = 1e-12);
        assert!(k.leptokurtic);
    }

    #[test]
    fn sum_with_degenerate_w_preserves_kurtosis() {
        // X with eta2 = 1, eta4 = 5; W = 0
        let r = kurtosis_of_sum([0.0, 1.0, 0.0, 5.0], [0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(r.kappa, 5.0, epsilon = 1e-14);
        assert!(r.hypothesis_satisfied);
    }

    #[test]
    fn sum_hypothesis_grid() {
        for eps in [0.01f64, 0.1, 0.5] {
            let x4 = 3.0 * (1.0 + eps).powi(2) + 0.01;
            let w2 = eps / 2.0;
            let r = kurtosis_of_sum([0.0, 1.0, 0.0, x4], [0.0, w2, 0.0, 3.0 * w2 * w2]).unwrap();
            assert!(r.hypothesis_satisfied, "eps = {eps}");
            assert!(r.kappa > 3.0, "eps = {eps}, kappa = {}", r.kappa);
        }
    }

    #[test]
    fn sum_requires_unit_x_variance() {
        assert!(kurtosis_of_sum([0.0, 2.0, 0.0, 12.0], [0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn sample_kurtosis_two_point() {
        let k = sample_kurtosis(&[-1.0, 1.0, -1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(k, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn sample_kurtosis_guards() {
        assert!(sample_kurtosis(&[1.0, 2.0, 3.0]).is_err());
        assert!(sample_kurtosis(&[2.0; 10]).is_err());
    }

    #[test]
    fn sample_kurtosis_gaussian_band() {
        let n = 200_000;
        let mut rng = crate::rng::SplitMix64::new(12);
        let draws: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
        let k = sample_kurtosis(&draws).unwrap();
        let band = 5.0 * (24.0 / n as f64).sqrt();
        assert!((k - 3.0).abs() < band, "gaussian kurtosis {k}");
    }

    #[test]
    fn density_small_matrix() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 5.0)],
        )
        .unwrap();
        let d = compute_density(&a);
        assert_abs_diff_eq!(d.rho, 2.75);
        assert_abs_diff_eq!(d.rho_bar, 5.0);
        assert_abs_diff_eq!(d.delta, 5.5);
    }

    #[test]
    fn density_zero_matrix() {
        let a = SparseMatrix::from_triplets(3, 3, vec![]).unwrap();
        let d = compute_density(&a);
        assert_eq!((d.rho, d.rho_bar, d.delta), (0.0, 0.0, 0.0));
    }
}
