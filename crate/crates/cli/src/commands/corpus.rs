//! `htmlsift corpus` — ingest documents into a store, inspect length
//! statistics, and plan length curricula.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use htmlsift_core::corpus::{
    ingest_dir, ingest_jsonl, length_stats, plan_curriculum, read_corpus, write_corpus,
    LengthStats,
};

use crate::config::Config;

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[command(subcommand)]
    pub command: CorpusCommand,
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// Build a deduplicated corpus store from a directory of HTML files or
    /// a JSONL file with {"html", "url"?} records.
    Ingest {
        /// Source: a directory (scanned for *.html / *.htm) or a .jsonl file.
        #[arg(long, required = true, value_name = "PATH")]
        input: PathBuf,
        /// Corpus store to write (JSONL, one document per line).
        #[arg(long, required = true, value_name = "FILE")]
        out: PathBuf,
    },
    /// Print document-length statistics for a corpus store.
    Stats {
        #[arg(long, required = true, value_name = "FILE")]
        store: PathBuf,
        /// Print the statistics as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Plan a length curriculum and write it as JSON.
    Curriculum {
        #[arg(long, required = true, value_name = "FILE")]
        store: PathBuf,
        /// Plan file to write.
        #[arg(long, required = true, value_name = "FILE")]
        out: PathBuf,
        /// Length budget in tokens (default: corpus.max_len from config).
        #[arg(long, value_name = "N")]
        max_len: Option<u64>,
        /// Target long-document share (default: corpus.long_fraction).
        #[arg(long, value_name = "F")]
        long_fraction: Option<f64>,
    },
}

pub fn run(args: &CorpusArgs, cfg: &Config) -> Result<i32> {
    match &args.command {
        CorpusCommand::Ingest { input, out } => ingest(input, out),
        CorpusCommand::Stats { store, json } => stats(store, *json),
        CorpusCommand::Curriculum { store, out, max_len, long_fraction } => curriculum(
            store,
            out,
            max_len.unwrap_or(cfg.corpus.max_len),
            long_fraction.unwrap_or(cfg.corpus.long_fraction),
            cfg.global.seed,
        ),
    }
}

fn ingest(input: &Path, out: &Path) -> Result<i32> {
    let report = if input.is_dir() {
        ingest_dir(input).with_context(|| format!("cannot ingest {}", input.display()))?
    } else if input.extension().and_then(|e| e.to_str()) == Some("jsonl") {
        ingest_jsonl(input).with_context(|| format!("cannot ingest {}", input.display()))?
    } else {
        bail!(
            "--input must be a directory or a .jsonl file, got {}",
            input.display()
        );
    };
    for warning in &report.warnings {
        log::warn!("{warning}");
    }
    write_corpus(out, &report.docs)
        .with_context(|| format!("cannot write corpus store {}", out.display()))?;
    println!(
        "ingested {} documents into {} ({} duplicates dropped, {} inputs skipped)",
        report.docs.len(),
        out.display(),
        report.duplicates,
        report.warnings.len()
    );
    Ok(0)
}

fn stats(store: &Path, as_json: bool) -> Result<i32> {
    let docs = read_corpus(store)
        .with_context(|| format!("cannot read corpus store {}", store.display()))?;
    let stats = length_stats(docs.iter())?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&stats).context("serialize stats")?);
    } else {
        print!("{}", stats_text(&stats));
    }
    Ok(0)
}

fn stats_text(stats: &LengthStats) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(out, "documents: {}", stats.count);
    let _ = writeln!(out, "mean:      {:.1} tokens", stats.mean);
    let _ = writeln!(out, "median:    {} tokens", stats.median);
    let _ = writeln!(out, "p95:       {} tokens", stats.p95);
    let _ = writeln!(out, "max:       {} tokens", stats.max);
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<22} docs", "tokens");
    for bucket in &stats.histogram {
        let label = match bucket.hi {
            Some(hi) if bucket.lo == 0 => format!("0-{hi}"),
            Some(hi) => format!("{}-{hi}", bucket.lo + 1),
            None => format!(">{}", bucket.lo),
        };
        let _ = writeln!(out, "{label:<22} {}", bucket.count);
    }
    out
}

fn curriculum(
    store: &Path,
    out: &Path,
    max_len: u64,
    long_fraction: f64,
    seed: u64,
) -> Result<i32> {
    let docs = read_corpus(store)
        .with_context(|| format!("cannot read corpus store {}", store.display()))?;
    let plan = plan_curriculum(&docs, max_len, long_fraction, seed)?;
    for warning in &plan.warnings {
        log::warn!("{warning}");
    }
    let mut text = serde_json::to_string_pretty(&plan).context("serialize plan")?;
    text.push('\n');
    std::fs::write(out, text).with_context(|| format!("cannot write {}", out.display()))?;
    println!(
        "curriculum: {} long + {} short documents (achieved long fraction {:.4}, target {:.4})",
        plan.long_bucket.len(),
        plan.short_bucket.len(),
        plan.achieved_fraction,
        plan.long_fraction
    );
    Ok(0)
}
