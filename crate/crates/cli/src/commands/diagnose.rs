//! `vsp diagnose`: export the diagnostics bundle for an existing factor
//! matrix, with an advisory when every factor looks Gaussian (in which
//! case no rotation is statistically identifiable).

use std::path::PathBuf;
use std::time::Instant;
use vsp::eval::{diagnostics, DEFAULT_PAIR_SAMPLE};
use vsp::Result;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Factor matrix CSV (headerless, one row per observation).
    #[arg(long)]
    factors: PathBuf,
    /// Optional singular values CSV; enables scree.csv.
    #[arg(long)]
    svals: Option<PathBuf>,
    /// Rows drawn for pairs.csv.
    #[arg(long, default_value_t = DEFAULT_PAIR_SAMPLE)]
    pairs_sample: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: Args) -> Result<()> {
    let started = Instant::now();
    let factors = vsp::io::read_csv_matrix(&args.factors)?;
    let svals = match &args.svals {
        Some(p) => Some(vsp::io::read_csv_vector(p)?),
        None => None,
    };
    std::fs::create_dir_all(&args.out)?;

    let bundle = diagnostics(
        &factors,
        svals.as_deref().unwrap_or(&[]),
        &factors,
        args.pairs_sample,
        args.seed,
    );

    vsp::io::write_csv_vector(args.out.join("kurtosis.csv"), &bundle.factor_kurtosis)?;
    vsp::io::write_csv_vector(args.out.join("participation.csv"), &bundle.participation)?;
    if svals.is_some() {
        vsp::io::write_csv_vector(args.out.join("scree.csv"), &bundle.scree)?;
    }
    let mut pairs = vsp::Mat::zeros(bundle.pair_sample.rows(), bundle.pair_sample.cols() + 1);
    for r in 0..bundle.pair_sample.rows() {
        pairs[(r, 0)] = bundle.pair_rows[r] as f64;
        for c in 0..bundle.pair_sample.cols() {
            pairs[(r, c + 1)] = bundle.pair_sample[(r, c)];
        }
    }
    vsp::io::write_csv_matrix(args.out.join("pairs.csv"), &pairs)?;

    println!("factor  kurtosis");
    for (j, k) in bundle.factor_kurtosis.iter().enumerate() {
        println!("{:<7} {:.6}", j + 1, k);
    }
    let near_gaussian = !bundle.factor_kurtosis.is_empty()
        && bundle
            .factor_kurtosis
            .iter()
            .all(|k| k.is_finite() && (2.5..=3.5).contains(k));
    if near_gaussian {
        println!("near-Gaussian: rotation not identifiable");
    }

    crate::manifest::write(
        &args.out,
        "diagnose",
        &[("factors", args.factors.display().to_string())],
        Some(args.seed),
        serde_json::json!({
            "pairs_sample": args.pairs_sample,
            "svals": args.svals.as_ref().map(|p| p.display().to_string()),
        }),
        started,
    )?;
    Ok(())
}
