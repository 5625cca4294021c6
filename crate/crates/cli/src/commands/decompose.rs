//! `vsp decompose`: run the full decomposition on a matrix file and write
//! factor CSVs plus the diagnostics bundle.

use clap::ValueEnum;
use std::path::PathBuf;
use std::time::Instant;
use vsp::eval::{diagnostics, estimate_topics, DEFAULT_PAIR_SAMPLE};
use vsp::sparse::CenterMode;
use vsp::{Error, Result, VspConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CenterModeArg {
    Full,
    Column,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Input matrix: MatrixMarket (.mtx) or headered TSV triplets.
    #[arg(long)]
    input: PathBuf,
    /// Number of factors to extract.
    #[arg(long)]
    k: usize,
    /// Double-center the (scaled) matrix implicitly before the SVD.
    #[arg(long)]
    center: bool,
    /// Normalize by regularized degrees on both sides first.
    #[arg(long)]
    scale: bool,
    /// Attach factor-mean estimates (requires --center).
    #[arg(long)]
    recenter: bool,
    /// Also write degree-rescaled factors (requires --scale).
    #[arg(long)]
    rescale: bool,
    /// Which mean terms centering subtracts.
    #[arg(long, value_enum, default_value = "full")]
    center_mode: CenterModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "vsp_out")]
    out: PathBuf,
    /// Extra test-matrix columns for the randomized SVD.
    #[arg(long, default_value_t = vsp::svd::DEFAULT_OVERSAMPLE)]
    oversample: usize,
    /// Forward/adjoint iterations for the randomized SVD.
    #[arg(long, default_value_t = vsp::svd::DEFAULT_POWER_ITERS)]
    power_iters: usize,
    /// Relative objective tolerance of the rotation solver.
    #[arg(long, default_value_t = 1e-10)]
    varimax_tol: f64,
    /// Number of rotation-solver starts (identity plus random).
    #[arg(long, default_value_t = 1)]
    varimax_restarts: usize,
    /// Row-normalize before solving the rotation (rotation only).
    #[arg(long)]
    kaiser_normalize: bool,
    /// Project topic estimates onto the simplex (clip negatives,
    /// renormalize); a post-hoc convenience, not part of the estimator.
    #[arg(long)]
    clip_simplex: bool,
    /// Rows drawn for pairs.csv.
    #[arg(long, default_value_t = DEFAULT_PAIR_SAMPLE)]
    pairs_sample: usize,
}

pub fn run(args: Args) -> Result<()> {
    let started = Instant::now();
    if args.recenter && !args.center {
        return Err(Error::InvalidArgument(
            "--recenter requires --center".into(),
        ));
    }
    if args.rescale && !args.scale {
        return Err(Error::InvalidArgument("--rescale requires --scale".into()));
    }
    if args.clip_simplex && !(args.center && matches!(args.center_mode, CenterModeArg::Column)) {
        return Err(Error::InvalidArgument(
            "--clip-simplex only applies with --center --center-mode column".into(),
        ));
    }
    let a = vsp::io::load_matrix(&args.input)?;

    let mut config = VspConfig::new(args.k);
    config.center = args.center;
    config.scale = args.scale;
    config.recenter = args.recenter;
    config.rescale = args.rescale;
    config.center_mode = match args.center_mode {
        CenterModeArg::Full => CenterMode::Full,
        CenterModeArg::Column => CenterMode::ColumnOnly,
    };
    config.seed = args.seed;
    config.oversample = args.oversample;
    config.power_iters = args.power_iters;
    config.varimax_tol = args.varimax_tol;
    config.varimax_restarts = args.varimax_restarts;
    config.kaiser_normalize = args.kaiser_normalize;

    let result = vsp::run_vsp(&a, &config)?;

    std::fs::create_dir_all(&args.out)?;
    let z_out = result.z_hat_rescaled.as_ref().unwrap_or(&result.z_hat);
    let y_out = result.y_hat_rescaled.as_ref().unwrap_or(&result.y_hat);
    vsp::io::write_csv_matrix(args.out.join("Z.csv"), z_out)?;
    vsp::io::write_csv_matrix(args.out.join("Y.csv"), y_out)?;
    vsp::io::write_csv_matrix(args.out.join("B.csv"), &result.b_hat)?;
    vsp::io::write_csv_vector(
        args.out.join("singular_values.csv"),
        &result.singular_values,
    )?;
    if let (Some(mu_z), Some(mu_y)) = (&result.mu_z, &result.mu_y) {
        vsp::io::write_csv_matrix(args.out.join("mu_Z.csv"), &row_matrix(mu_z))?;
        vsp::io::write_csv_matrix(args.out.join("mu_Y.csv"), &row_matrix(mu_y))?;
    }

    // topic estimates come for free when the decomposition used the
    // column-centered operator
    if config.center && config.center_mode == CenterMode::ColumnOnly {
        let op = vsp::build_operator(
            &a,
            result.scaling.clone(),
            result.centering.clone(),
            CenterMode::ColumnOnly,
        )?;
        let mut beta_hat = estimate_topics(&result.z_hat, &op)?;
        if args.clip_simplex {
            beta_hat = vsp::eval::clip_simplex(&beta_hat)?;
        }
        vsp::io::write_csv_matrix(args.out.join("beta_hat.csv"), &beta_hat)?;
    }

    let bundle = diagnostics(
        &result.z_hat,
        &result.singular_values,
        &result.u_hat,
        args.pairs_sample,
        args.seed,
    );
    write_diagnostics(&args.out, &bundle)?;

    println!("factor  kurtosis");
    for (j, k) in bundle.factor_kurtosis.iter().enumerate() {
        println!("{:<7} {:.6}", j + 1, k);
    }

    crate::manifest::write(
        &args.out,
        "decompose",
        &[("input", args.input.display().to_string())],
        Some(args.seed),
        &config,
        started,
    )?;
    Ok(())
}

fn row_matrix(v: &[f64]) -> vsp::Mat {
    vsp::Mat::from_fn(1, v.len(), |_, j| v[j])
}

pub fn write_diagnostics(
    out: &std::path::Path,
    bundle: &vsp::eval::DiagnosticsBundle,
) -> Result<()> {
    vsp::io::write_csv_vector(out.join("kurtosis.csv"), &bundle.factor_kurtosis)?;
    vsp::io::write_csv_vector(out.join("scree.csv"), &bundle.scree)?;
    vsp::io::write_csv_vector(out.join("participation.csv"), &bundle.participation)?;
    // pairs.csv: row id followed by the factor coordinates
    let mut pairs = vsp::Mat::zeros(bundle.pair_sample.rows(), bundle.pair_sample.cols() + 1);
    for r in 0..bundle.pair_sample.rows() {
        pairs[(r, 0)] = bundle.pair_rows[r] as f64;
        for c in 0..bundle.pair_sample.cols() {
            pairs[(r, c + 1)] = bundle.pair_sample[(r, c)];
        }
    }
    vsp::io::write_csv_matrix(out.join("pairs.csv"), &pairs)?;
    Ok(())
}
