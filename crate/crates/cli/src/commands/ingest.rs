//! `vsp ingest`: build a document-term matrix from a directory of plain
//! text files. Tokenization is deliberately simple: lowercase, split on
//! anything that is not alphanumeric.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;
use vsp::sparse::SparseMatrix;
use vsp::{Error, Result};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Directory of documents, one plain-text file each.
    #[arg(long)]
    corpus: PathBuf,
    /// Keep tokens appearing in at least this many documents.
    #[arg(long)]
    min_count: usize,
    /// Output matrix path (MatrixMarket); vocab.txt and docs.txt are
    /// written next to it.
    #[arg(long)]
    out: PathBuf,
    /// Write 0/1 occurrence indicators instead of counts.
    #[arg(long)]
    binary: bool,
}

pub fn run(args: Args) -> Result<()> {
    let started = Instant::now();
    let mut files: Vec<PathBuf> = std::fs::read_dir(&args.corpus)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "empty corpus: no files in {}",
            args.corpus.display()
        )));
    }

    // per-document token counts, plus document frequencies
    let mut doc_counts: Vec<BTreeMap<String, u64>> = Vec::with_capacity(files.len());
    let mut doc_freq: BTreeMap<String, usize> = BTreeMap::new();
    for path in &files {
        let text = std::fs::read_to_string(path)?;
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for token in text
            .to_lowercase()
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
        {
            *counts.entry(token.to_string()).or_insert(0) += 1;
        }
        for token in counts.keys() {
            *doc_freq.entry(token.clone()).or_insert(0) += 1;
        }
        doc_counts.push(counts);
    }

    // vocabulary: document frequency at least min_count, lexicographic order
    let vocab: Vec<String> = doc_freq
        .iter()
        .filter(|(_, &df)| df >= args.min_count)
        .map(|(t, _)| t.clone())
        .collect();
    if vocab.is_empty() {
        return Err(Error::InvalidArgument(
            "empty vocabulary: no token meets the document-frequency threshold".into(),
        ));
    }
    let index: BTreeMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(j, t)| (t.as_str(), j))
        .collect();

    let mut triplets = Vec::new();
    for (i, counts) in doc_counts.iter().enumerate() {
        for (token, &c) in counts {
            if let Some(&j) = index.get(token.as_str()) {
                let v = if args.binary { 1.0 } else { c as f64 };
                triplets.push((i, j, v));
            }
        }
    }
    let a = SparseMatrix::from_triplets(files.len(), vocab.len(), triplets)?;
    let out_dir = args
        .out
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    vsp::io::write_matrix_market(&args.out, &a)?;
    std::fs::write(out_dir.join("vocab.txt"), vocab.join("\n") + "\n")?;
    let docs: Vec<String> = files
        .iter()
        .map(|p| {
            p.file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned()
        })
        .collect();
    std::fs::write(out_dir.join("docs.txt"), docs.join("\n") + "\n")?;

    crate::manifest::write(
        &out_dir,
        "ingest",
        &[
            ("corpus", args.corpus.display().to_string()),
            ("out", args.out.display().to_string()),
        ],
        None,
        serde_json::json!({ "min_count": args.min_count, "binary": args.binary }),
        started,
    )?;
    println!(
        "{} documents, {} terms, {} stored entries",
        a.n_rows(),
        a.n_cols(),
        a.nnz()
    );
    Ok(())
}
