//! `vsp evaluate`: align estimated factors with a simulation truth and
//! report row-wise and Frobenius errors, plus the topic l1 error when
//! requested.

use clap::ValueEnum;
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;
use vsp::eval::{align_factors, topic_l1_error, AlignMode};
use vsp::{Error, Result};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exact,
    Greedy,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Directory with the estimate (Z.csv, optionally beta_hat.csv).
    #[arg(long)]
    est: PathBuf,
    /// Directory with the truth (Z.csv, optionally beta.csv).
    #[arg(long)]
    truth: PathBuf,
    /// Alignment search: exhaustive (k <= 8) or greedy correlation matching.
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    /// Also compute the per-topic l1 error from beta_hat.csv vs beta.csv.
    #[arg(long)]
    topics: bool,
    /// Report directory; defaults to <est>/eval.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    err_two_inf: f64,
    err_frob: f64,
    permutation: Vec<usize>,
    signs: Vec<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    topic_l1: Option<f64>,
}

pub fn run(args: Args) -> Result<()> {
    let started = Instant::now();
    let est = vsp::io::read_csv_matrix(args.est.join("Z.csv"))?;
    let truth = vsp::io::read_csv_matrix(args.truth.join("Z.csv"))?;
    if est.rows() != truth.rows() || est.cols() != truth.cols() {
        return Err(Error::DimensionMismatch(format!(
            "estimate is {}x{}, truth is {}x{}",
            est.rows(),
            est.cols(),
            truth.rows(),
            truth.cols()
        )));
    }
    let mode = match args.mode {
        ModeArg::Exact => {
            if est.cols() > 8 {
                return Err(Error::InvalidArgument(format!(
                    "exact alignment is limited to k <= 8 (k = {}); use --mode greedy",
                    est.cols()
                )));
            }
            AlignMode::Exact
        }
        ModeArg::Greedy => AlignMode::Greedy,
    };
    let alignment = align_factors(&est, &truth, mode)?;

    let topic_l1 = if args.topics {
        let beta_hat = vsp::io::read_csv_matrix(args.est.join("beta_hat.csv"))?;
        let beta = vsp::io::read_csv_matrix(args.truth.join("beta.csv"))?;
        if beta_hat.rows() != beta.rows() || beta_hat.cols() != beta.cols() {
            return Err(Error::DimensionMismatch(format!(
                "beta_hat is {}x{}, beta is {}x{}",
                beta_hat.rows(),
                beta_hat.cols(),
                beta.rows(),
                beta.cols()
            )));
        }
        Some(topic_l1_error(&beta_hat, &beta)?)
    } else {
        None
    };

    let report = Report {
        err_two_inf: alignment.err_two_inf,
        err_frob: alignment.err_frob,
        permutation: alignment.best_p.perm().to_vec(),
        signs: alignment.best_p.signs().to_vec(),
        topic_l1,
    };
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    println!("{json}");

    let out = args.out.clone().unwrap_or_else(|| args.est.join("eval"));
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("report.json"), json + "\n")?;
    crate::manifest::write(
        &out,
        "evaluate",
        &[
            ("est", args.est.display().to_string()),
            ("truth", args.truth.display().to_string()),
        ],
        None,
        serde_json::json!({
            "mode": format!("{:?}", args.mode),
            "topics": args.topics,
        }),
        started,
    )?;
    Ok(())
}
