//! `htmlsift convert` — HTML files in, Markdown files out.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use htmlsift_core::html::parse_html;
use htmlsift_core::markdown::{convert, ExtractionInstruction, ScopeMode};
use htmlsift_core::Selector;

use crate::config::Config;

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// HTML files, or directories scanned recursively for *.html / *.htm.
    #[arg(required = true, value_name = "INPUT")]
    pub inputs: Vec<PathBuf>,

    /// Directory receiving one <stem>.md per input.
    #[arg(long, default_value = ".", value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Render only subtrees matching this selector (repeatable). Without it,
    /// the main content is detected automatically.
    #[arg(long, value_name = "SELECTOR")]
    pub select: Vec<String>,

    /// Remove subtrees matching this selector before converting (repeatable).
    #[arg(long, value_name = "SELECTOR")]
    pub exclude: Vec<String>,
}

pub fn instruction_from_flags(select: &[String], exclude: &[String]) -> Result<ExtractionInstruction> {
    let parse_all = |texts: &[String]| -> Result<Vec<Selector>> {
        texts
            .iter()
            .map(|t| Selector::parse(t).with_context(|| format!("invalid selector {t:?}")))
            .collect()
    };
    let include = parse_all(select)?;
    let exclude = parse_all(exclude)?;
    Ok(ExtractionInstruction {
        mode: if include.is_empty() { ScopeMode::MainContent } else { ScopeMode::Scoped },
        include,
        exclude,
    })
}

pub fn run(args: &ConvertArgs, _cfg: &Config) -> Result<i32> {
    let instruction = instruction_from_flags(&args.select, &args.exclude)?;
    let files = super::collect_html_inputs(&args.inputs)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create output directory {}", args.out_dir.display()))?;
    let outputs = super::plan_outputs(&files, &args.out_dir, "md")?;

    let mut failures = 0usize;
    for (file, out) in files.iter().zip(&outputs) {
        match convert_one(file, out, &instruction) {
            Ok(()) => log::info!("{} -> {}", file.display(), out.display()),
            Err(e) => {
                failures += 1;
                log::error!("{}: {e:#}", file.display());
            }
        }
    }
    if failures > 0 {
        log::warn!("failed to convert {failures} of {} inputs", files.len());
        return Ok(2);
    }
    Ok(0)
}

fn convert_one(
    file: &std::path::Path,
    out: &std::path::Path,
    instruction: &ExtractionInstruction,
) -> Result<()> {
    let bytes = std::fs::read(file).context("cannot read input")?;
    let tree = parse_html(&bytes, None);
    let doc = convert(&tree, instruction)?;
    std::fs::write(out, &doc.body).with_context(|| format!("cannot write {}", out.display()))?;
    Ok(())
}
