//! `vsp simulate`: generate a data set from a model specification file and
//! write the matrix, the true factors, and a truth manifest with density
//! and identifiability summaries.

use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;
use vsp::models::{
    analytic_kurtosis, analytic_kurtosis_component, generate_dcsbm, generate_factor_model,
    generate_lda, generate_mixed_membership, generate_overlapping, kurtosis_of_sparse,
    parse_model_spec, Density, DistributionSpec, ModelKind, ModelSpec,
};
use vsp::{Mat, Result};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Model family: factor | sbm | dcsbm | overlap | mixed | lda.
    #[arg(long)]
    model: String,
    /// Key-value specification file.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "sim_out")]
    out: PathBuf,
}

#[derive(Serialize)]
struct Truth {
    model: &'static str,
    n: usize,
    d: usize,
    k: usize,
    seed: u64,
    rho: f64,
    rho_bar: f64,
    delta: f64,
    /// Analytic kurtosis per factor column (null when undefined).
    column_kurtosis: Vec<Option<f64>>,
    /// Per-column identifiability flag: kurtosis above the Gaussian value.
    identifiable: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_min_beta: Option<f64>,
}

pub fn run(args: Args) -> Result<()> {
    let started = Instant::now();
    let kind = ModelKind::parse(&args.model)?;
    let text = std::fs::read_to_string(&args.spec)?;
    let spec = parse_model_spec(kind, &text)?;
    std::fs::create_dir_all(&args.out)?;

    let truth = match &spec {
        ModelSpec::Factor(s) => {
            let sample = generate_factor_model(s, args.seed)?;
            vsp::io::write_matrix_market(args.out.join("A.mtx"), &sample.a)?;
            vsp::io::write_csv_matrix(args.out.join("Z.csv"), &sample.z)?;
            vsp::io::write_csv_matrix(args.out.join("Y.csv"), &sample.y)?;
            let density = expectation_density(&sample.z, &s.b, s.rho, &sample.y);
            let kappas: Vec<Option<f64>> = s
                .z_dists
                .iter()
                .map(|d| analytic_kurtosis(d).ok())
                .collect();
            Truth {
                model: kind.name(),
                n: s.n,
                d: s.d,
                k: s.k,
                seed: args.seed,
                rho: density.rho,
                rho_bar: density.rho_bar,
                delta: density.delta,
                identifiable: flags(&kappas),
                column_kurtosis: kappas,
                sigma_min_beta: None,
            }
        }
        ModelSpec::Dcsbm(s) => {
            let sample = generate_dcsbm(s, args.seed)?;
            vsp::io::write_matrix_market(args.out.join("A.mtx"), &sample.a)?;
            vsp::io::write_csv_matrix(args.out.join("Z.csv"), &sample.z)?;
            let theta_m = s.theta_dist.moments()?;
            let kappas: Vec<Option<f64>> =
                s.pi.iter()
                    .map(|&p| kurtosis_of_sparse(p, &theta_m).ok().map(|r| r.kappa))
                    .collect();
            truth_from_density(kind, s.n, s.n, s.k, args.seed, sample.density, kappas, None)
        }
        ModelSpec::Overlap(s) => {
            let sample = generate_overlapping(s, args.seed)?;
            vsp::io::write_matrix_market(args.out.join("A.mtx"), &sample.a)?;
            vsp::io::write_csv_matrix(args.out.join("Z.csv"), &sample.z)?;
            let kappas: Vec<Option<f64>> =
                s.p.iter()
                    .map(|&p| {
                        DistributionSpec::bernoulli(p)
                            .ok()
                            .and_then(|d| analytic_kurtosis(&d).ok())
                    })
                    .collect();
            truth_from_density(kind, s.n, s.n, s.k, args.seed, sample.density, kappas, None)
        }
        ModelSpec::Mixed(s) => {
            let sample = generate_mixed_membership(s, args.seed)?;
            vsp::io::write_matrix_market(args.out.join("A.mtx"), &sample.a)?;
            vsp::io::write_csv_matrix(args.out.join("Z.csv"), &sample.z)?;
            let law = DistributionSpec::dirichlet(s.alpha.clone())?;
            let kappas: Vec<Option<f64>> = (0..s.k)
                .map(|j| analytic_kurtosis_component(&law, j).ok())
                .collect();
            truth_from_density(kind, s.n, s.n, s.k, args.seed, sample.density, kappas, None)
        }
        ModelSpec::Lda(s) => {
            let sample = generate_lda(s, args.seed)?;
            vsp::io::write_matrix_market(args.out.join("A.mtx"), &sample.a)?;
            vsp::io::write_csv_matrix(args.out.join("Z.csv"), &sample.z_star)?;
            vsp::io::write_csv_matrix(args.out.join("Zweights.csv"), &sample.z)?;
            vsp::io::write_csv_vector(args.out.join("xi.csv"), &sample.xi)?;
            vsp::io::write_csv_matrix(args.out.join("beta.csv"), &s.beta)?;
            // E(A | Xi, Z) has row sums xi_i because beta is column
            // stochastic, and its max entry is max_i,w <X_i, beta_w>
            let total: f64 = sample.xi.iter().sum();
            let mut rho_bar = 0.0f64;
            let x = rescale_back(&sample.z_star, &s.alpha, s.s);
            for i in 0..s.n {
                for w in 0..s.d {
                    let lam = vsp::dense::dot(x.row(i), s.beta.row(w));
                    rho_bar = rho_bar.max(lam);
                }
            }
            let density = Density {
                rho: total / (s.n * s.d) as f64,
                rho_bar,
                delta: s.n as f64 * total / (s.n * s.d) as f64,
            };
            let kappas: Vec<Option<f64>> = s.alpha.iter().map(|&a| Some(3.0 + 6.0 / a)).collect();
            truth_from_density(
                kind,
                s.n,
                s.d,
                s.k,
                args.seed,
                density,
                kappas,
                Some(s.sigma_min_beta()),
            )
        }
    };

    let json = serde_json::to_string_pretty(&truth)
        .map_err(|e| vsp::Error::InvalidArgument(e.to_string()))?;
    std::fs::write(args.out.join("truth.json"), json + "\n")?;

    crate::manifest::write(
        &args.out,
        "simulate",
        &[
            ("model", args.model.clone()),
            ("spec", args.spec.display().to_string()),
        ],
        Some(args.seed),
        serde_json::json!({ "spec_file": args.spec.display().to_string(), "model": args.model }),
        started,
    )?;
    Ok(())
}

fn flags(kappas: &[Option<f64>]) -> Vec<bool> {
    kappas
        .iter()
        .map(|k| matches!(k, Some(v) if *v > 3.0))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn truth_from_density(
    kind: ModelKind,
    n: usize,
    d: usize,
    k: usize,
    seed: u64,
    density: Density,
    kappas: Vec<Option<f64>>,
    sigma_min_beta: Option<f64>,
) -> Truth {
    Truth {
        model: kind.name(),
        n,
        d,
        k,
        seed,
        rho: density.rho,
        rho_bar: density.rho_bar,
        delta: density.delta,
        identifiable: flags(&kappas),
        column_kurtosis: kappas,
        sigma_min_beta,
    }
}

/// Streaming density of the expectation rho Z B Y^T without storing it.
fn expectation_density(z: &Mat, b: &Mat, rho: f64, y: &Mat) -> Density {
    let (n, k) = (z.rows(), z.cols());
    let d = y.rows();
    let bscaled = b.scale(rho);
    let mut total = 0.0;
    let mut max_abs = 0.0f64;
    let mut w = vec![0.0; k];
    for i in 0..n {
        for (l, wl) in w.iter_mut().enumerate() {
            *wl = (0..k).map(|t| z[(i, t)] * bscaled[(t, l)]).sum();
        }
        for j in 0..d {
            let v = vsp::dense::dot(&w, y.row(j));
            total += v;
            max_abs = max_abs.max(v.abs());
        }
    }
    let rho_mean = total / (n * d) as f64;
    Density {
        rho: rho_mean,
        rho_bar: max_abs,
        delta: n as f64 * rho_mean,
    }
}

/// X recovered from Z* = X Sigma^{-1/2}.
fn rescale_back(z_star: &Mat, alpha: &[f64], s: f64) -> Mat {
    Mat::from_fn(z_star.rows(), z_star.cols(), |i, j| {
        z_star[(i, j)] * (alpha[j] * s * s).sqrt()
    })
}
