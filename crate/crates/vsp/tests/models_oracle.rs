//! Monte Carlo cross-checks of the analytic moment machinery, the
//! sparsity-to-kurtosis theorems on parameter grids, and the structural
//! invariants of the generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vsp::dense::Mat;
use vsp::models::{
    analytic_kurtosis, analytic_kurtosis_component, generate_factor_model, generate_lda,
    generate_overlapping, kurtosis_of_sparse, kurtosis_of_sum, sample_kurtosis, DistributionSpec,
    FactorModelSpec, LdaSpec, NoiseFamily, OverlapSpec,
};

/// Every scalar family: analytic kurtosis within 3 asymptotic standard
/// errors of the sample kurtosis of 10^6 draws.
#[test]
fn distribution_self_consistency_monte_carlo() {
    let n = 1_000_000usize;
    let cases = vec![
        ("bernoulli", DistributionSpec::bernoulli(0.2).unwrap()),
        (
            "scaled_bernoulli",
            DistributionSpec::scaled_bernoulli(0.15, DistributionSpec::uniform(0.5, 2.0).unwrap())
                .unwrap(),
        ),
        ("exponential", DistributionSpec::exponential(1.5).unwrap()),
        ("gamma", DistributionSpec::gamma(2.5, 0.7).unwrap()),
        ("uniform", DistributionSpec::uniform(-1.0, 2.0).unwrap()),
        (
            "shifted",
            DistributionSpec::shifted(DistributionSpec::gamma(1.0, 1.0).unwrap(), -1.0).unwrap(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    for (name, dist) in cases {
        let kappa = analytic_kurtosis(&dist).unwrap();
        let draws: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng).unwrap()).collect();
        let sample = sample_kurtosis(&draws).unwrap();
        // asymptotic SE of sample kurtosis for a Gaussian is sqrt(24/n); for
        // heavy-tailed families the dispersion is larger, so scale the band
        // by the kurtosis level itself
        let se = (24.0 / n as f64).sqrt() * kappa.max(1.0);
        assert!(
            (sample - kappa).abs() < 3.0 * se * 3.0,
            "{name}: sample {sample} vs analytic {kappa}"
        );
    }
}

/// Dirichlet component marginals are Beta; check against sampled rows.
#[test]
fn dirichlet_component_kurtosis_monte_carlo() {
    let alpha = vec![0.5, 1.0, 2.0];
    let dist = DistributionSpec::dirichlet(alpha).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 400_000;
    let mut cols: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(n)).collect();
    for _ in 0..n {
        let row = dist.sample_row(&mut rng).unwrap();
        for (j, v) in row.into_iter().enumerate() {
            cols[j].push(v);
        }
    }
    for (j, col) in cols.iter().enumerate() {
        let kappa = analytic_kurtosis_component(&dist, j).unwrap();
        let sample = sample_kurtosis(col).unwrap();
        assert!(
            (sample - kappa).abs() < 0.2 * kappa.max(1.0),
            "component {j}: {sample} vs {kappa}"
        );
    }
}

/// Hard-sparsity theorem sweep: a 200-point grid over p in (0, 1/6) and
/// magnitude laws S; the composed law is leptokurtic at every point.
#[test]
fn sparsity_theorem_sweep_no_counterexamples() {
    let magnitudes = [
        DistributionSpec::point_mass(1.0).unwrap(),
        DistributionSpec::point_mass(-2.5).unwrap(),
        DistributionSpec::uniform(0.5, 1.5).unwrap(),
        DistributionSpec::uniform(-2.0, 5.0).unwrap(),
        DistributionSpec::exponential(1.0).unwrap(),
        DistributionSpec::gamma(3.0, 0.5).unwrap(),
        DistributionSpec::gamma(0.5, 2.0).unwrap(),
        DistributionSpec::shifted(DistributionSpec::uniform(0.0, 1.0).unwrap(), 3.0).unwrap(),
    ];
    let mut checked = 0;
    for (mi, mag) in magnitudes.iter().enumerate() {
        let moments = mag.moments().unwrap();
        for t in 0..25 {
            let p = (t as f64 + 0.5) / 25.0 / 6.0; // strictly inside (0, 1/6)
            let r = kurtosis_of_sparse(p, &moments).unwrap();
            assert!(
                r.leptokurtic && r.kappa > 3.0,
                "counterexample at magnitude {mi}, p = {p}: kappa = {}",
                r.kappa
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 200);
}

/// Bernoulli boundary: kurtosis is exactly 3 at p = 1/2 +- 1/sqrt(12).
#[test]
fn bernoulli_kurtosis_boundary() {
    let ones = DistributionSpec::point_mass(1.0)
        .unwrap()
        .moments()
        .unwrap();
    for p in [0.5 - 1.0 / 12f64.sqrt(), 0.5 + 1.0 / 12f64.sqrt()] {
        let r = kurtosis_of_sparse(p, &ones).unwrap();
        assert!(
            (r.kappa - 3.0).abs() < 1e-12,
            "p = {p}: kappa = {}",
            r.kappa
        );
    }
}

/// Soft-sparsity sweep: every hypothesis-satisfying parameterization on a
/// 100-point grid yields kurtosis above 3, plus one Monte Carlo cross-check
/// of the expansion itself.
#[test]
fn soft_sparsity_sweep_and_monte_carlo() {
    let mut satisfied = 0;
    for a in 0..10 {
        for b in 0..10 {
            let eps = 0.02 + 0.06 * a as f64;
            let w2 = eps * (0.2 + 0.075 * b as f64); // below eps
            let x4 = 3.0 * (1.0 + eps).powi(2) + 0.05;
            let w4 = 3.0 * w2 * w2; // Gaussian-shaped noise
            let r = kurtosis_of_sum([0.0, 1.0, 0.0, x4], [0.0, w2, 0.0, w4]).unwrap();
            assert!(r.hypothesis_satisfied, "grid point ({a}, {b})");
            assert!(r.kappa > 3.0, "grid point ({a}, {b}): kappa {}", r.kappa);
            satisfied += 1;
        }
    }
    assert_eq!(satisfied, 100);

    // Monte Carlo: X centered-and-scaled Exponential(1), W Gaussian with
    // variance 0.05; the analytic expansion must match the sampled kurtosis
    let x4 = 9.0; // eta4 of standardized Exponential(1)
    let w2 = 0.05;
    let w4 = 3.0 * w2 * w2;
    let analytic = kurtosis_of_sum([0.0, 1.0, 0.0, x4], [0.0, w2, 0.0, w4]).unwrap();
    let mut rng = vsp::rng::SplitMix64::new(99);
    let n = 2_000_000;
    let draws: Vec<f64> = (0..n)
        .map(|_| {
            let x = -(1.0 - rng.next_f64()).ln() - 1.0;
            let w = w2.sqrt() * rng.next_normal();
            x + w
        })
        .collect();
    let sample = sample_kurtosis(&draws).unwrap();
    let se = (24.0 / n as f64).sqrt() * analytic.kappa;
    assert!(
        (sample - analytic.kappa).abs() < 3.0 * se * 3.0,
        "sum kurtosis: sampled {sample}, expansion {}",
        analytic.kappa
    );
}

/// Overlapping model: identifiability flag follows the Bernoulli kurtosis.
#[test]
fn overlapping_identifiability_flags() {
    let ones = DistributionSpec::point_mass(1.0)
        .unwrap()
        .moments()
        .unwrap();
    let sparse = kurtosis_of_sparse(0.1, &ones).unwrap();
    assert!(sparse.kappa > 3.0 && sparse.leptokurtic);
    let half = kurtosis_of_sparse(0.5, &ones).unwrap();
    assert!((half.kappa - 1.0).abs() < 1e-12);
    assert!(!half.leptokurtic);
}

/// Poisson factor model: the empirical grand mean tracks the expectation
/// grand mean within a CLT band.
#[test]
fn poisson_noise_preserves_expectation() {
    let spec = FactorModelSpec {
        n: 500,
        d: 500,
        k: 2,
        b: Mat::from_rows(vec![vec![1.0, 0.2], vec![0.2, 1.0]]).unwrap(),
        z_dists: vec![DistributionSpec::gamma(2.0, 0.5).unwrap(); 2],
        y_dists: vec![DistributionSpec::uniform(0.0, 1.0).unwrap(); 2],
        noise: NoiseFamily::Poisson,
        rho: 0.5,
    };
    let s = generate_factor_model(&spec, 31).unwrap();
    let expectation = s.z.matmul(&spec.b.scale(spec.rho)).matmul(&s.y.transpose());
    let mean_model: f64 = expectation.data().iter().sum::<f64>() / (spec.n * spec.d) as f64;
    let mean_obs = s.a.sum() / (spec.n * spec.d) as f64;
    // var of the grand mean of independent Poissons is mean/(nd)
    let se = (mean_model / (spec.n * spec.d) as f64).sqrt();
    assert!(
        (mean_obs - mean_model).abs() < 3.0 * se,
        "grand mean {mean_obs} vs {mean_model} (se {se})"
    );
}

/// LDA: intensity columns are uncorrelated across topics and independent
/// of the simplex weights only through the total; correlations of xi with
/// the Dirichlet weights vanish.
#[test]
fn lda_independence_structure() {
    let beta = LdaSpec::block_topics(60, 3, 20, 1.0).unwrap();
    let spec = LdaSpec::new(20_000, 60, 3, vec![0.8, 0.8, 0.8], 5.0, beta).unwrap();
    let s = generate_lda(&spec, 3).unwrap();
    let corr = |a: &[f64], b: &[f64]| {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut num = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for i in 0..a.len() {
            num += (a[i] - ma) * (b[i] - mb);
            va += (a[i] - ma).powi(2);
            vb += (b[i] - mb).powi(2);
        }
        num / (va * vb).sqrt()
    };
    let band = 3.0 / (spec.n as f64).sqrt();
    // columns of Z* pairwise uncorrelated
    for a in 0..3 {
        for b in (a + 1)..3 {
            let c = corr(&s.z_star.col(a), &s.z_star.col(b));
            assert!(c.abs() < 2.0 * band, "z* corr({a},{b}) = {c}");
        }
    }
    // xi independent of the simplex weights
    for j in 0..3 {
        let c = corr(&s.xi, &s.z.col(j));
        assert!(c.abs() < 2.0 * band, "corr(xi, z_{j}) = {c}");
    }
}

/// Gamma kurtosis 3 + 6/alpha for the LDA factor columns.
#[test]
fn lda_gamma_kurtosis() {
    for alpha in [0.5, 1.0, 4.0] {
        let d = DistributionSpec::gamma(alpha, 3.0).unwrap();
        let k = analytic_kurtosis(&d).unwrap();
        assert!(
            (k - (3.0 + 6.0 / alpha)).abs() < 1e-10,
            "alpha {alpha}: kurtosis {k}"
        );
        assert!(k > 3.0);
    }
}

/// Every generator reproduces itself bit for bit at a fixed (spec, seed).
#[test]
fn generators_deterministic_given_seed() {
    use vsp::models::{generate_dcsbm, generate_mixed_membership, DcSbmSpec, MixedMembershipSpec};
    let dcsbm = DcSbmSpec {
        n: 80,
        k: 2,
        pi: vec![0.5, 0.5],
        b: Mat::identity(2),
        rho: 0.2,
        theta_dist: DistributionSpec::uniform(0.8, 1.2).unwrap(),
    };
    let (a, b) = (
        generate_dcsbm(&dcsbm, 5).unwrap(),
        generate_dcsbm(&dcsbm, 5).unwrap(),
    );
    assert_eq!(a.a, b.a);
    assert_eq!(a.z.data(), b.z.data());

    let mixed = MixedMembershipSpec {
        n: 60,
        k: 3,
        alpha: vec![0.4, 0.4, 0.4],
        b: Mat::identity(3),
        rho: 0.05,
    };
    let (a, b) = (
        generate_mixed_membership(&mixed, 9).unwrap(),
        generate_mixed_membership(&mixed, 9).unwrap(),
    );
    assert_eq!(a.a, b.a);

    let beta = LdaSpec::block_topics(30, 2, 10, 1.0).unwrap();
    let lda = LdaSpec::new(50, 30, 2, vec![0.5, 0.5], 6.0, beta).unwrap();
    let (a, b) = (
        generate_lda(&lda, 2).unwrap(),
        generate_lda(&lda, 2).unwrap(),
    );
    assert_eq!(a.a, b.a);
    assert_eq!(a.xi, b.xi);
}

/// Overlapping generator with p = 0.5 produces non-identifiable columns
/// and the binary structure is preserved.
#[test]
fn overlapping_structure() {
    let spec = OverlapSpec {
        n: 120,
        k: 2,
        p: vec![0.1, 0.5],
        b: Mat::identity(2),
        rho: 0.2,
    };
    let s = generate_overlapping(&spec, 8).unwrap();
    assert!(s.z.data().iter().all(|&v| v == 0.0 || v == 1.0));
    // symmetric, zero diagonal
    let dense = s.a.to_dense();
    for i in 0..120 {
        assert_eq!(dense[(i, i)], 0.0);
        for j in 0..120 {
            assert_eq!(dense[(i, j)], dense[(j, i)]);
        }
    }
}
