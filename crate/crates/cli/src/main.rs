//! Batch front end: decompose a matrix, simulate from the model families,
//! evaluate an estimate against a simulation truth, export diagnostics,
//! and ingest a text corpus into a document-term matrix.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.

mod commands;
mod manifest;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "vsp",
    version,
    about = "Sparse factor analysis via rotated truncated SVD"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a sparse matrix into rotated factors.
    Decompose(commands::decompose::Args),
    /// Generate a synthetic data set from one of the model families.
    Simulate(commands::simulate::Args),
    /// Compare estimated factors against a simulation truth.
    Evaluate(commands::evaluate::Args),
    /// Export kurtosis / scree / pair-plot / participation diagnostics.
    Diagnose(commands::diagnose::Args),
    /// Build a document-term matrix from a directory of text files.
    Ingest(commands::ingest::Args),
}

/// Maps library errors onto the documented exit codes. `data_only`
/// reclassifies argument-level failures as data errors, which is what
/// `simulate` wants: a spec file that violates a model invariant is bad
/// data, not bad usage.
fn exit_code(err: &vsp::Error, data_only: bool) -> i32 {
    use vsp::Error::*;
    match err {
        InvalidArgument(_) | SizeGuard(_) => {
            if data_only {
                2
            } else {
                1
            }
        }
        RankDeficient | DegenerateTopic(_) => 3,
        _ => 2,
    }
}

fn main() {
    if let Ok(threads) = std::env::var("VSP_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits with 2 by default; usage errors are exit 1 here
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            std::process::exit(if is_help { 0 } else { 1 });
        }
    };
    let outcome = match cli.command {
        Command::Decompose(args) => commands::decompose::run(args).map_err(|e| (e, false)),
        Command::Simulate(args) => commands::simulate::run(args).map_err(|e| (e, true)),
        Command::Evaluate(args) => commands::evaluate::run(args).map_err(|e| (e, false)),
        Command::Diagnose(args) => commands::diagnose::run(args).map_err(|e| (e, false)),
        Command::Ingest(args) => commands::ingest::run(args).map_err(|e| (e, true)),
    };
    if let Err((err, data_only)) = outcome {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err, data_only));
    }
}
