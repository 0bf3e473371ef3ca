//! `htmlsift extract-json` — schema-guided JSON extraction from HTML files.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use htmlsift_core::html::parse_html;
use htmlsift_core::json_extract::{extract_json, ExtractionTemplate, JsonSchemaSpec};

use crate::config::Config;

#[derive(Debug, Args)]
pub struct ExtractJsonArgs {
    /// HTML files, or directories scanned recursively for *.html / *.htm.
    #[arg(required = true, value_name = "INPUT")]
    pub inputs: Vec<PathBuf>,

    /// JSON schema the extracted objects must conform to.
    #[arg(long, required = true, value_name = "FILE")]
    pub schema: PathBuf,

    /// Extraction template mapping schema fields to selectors.
    #[arg(long, required = true, value_name = "FILE")]
    pub template: PathBuf,

    /// Directory receiving one <stem>.json per input.
    #[arg(long, default_value = ".", value_name = "DIR")]
    pub out_dir: PathBuf,
}

pub fn run(args: &ExtractJsonArgs, _cfg: &Config) -> Result<i32> {
    let schema_text = std::fs::read_to_string(&args.schema)
        .with_context(|| format!("cannot read schema {}", args.schema.display()))?;
    let schema = JsonSchemaSpec::from_json(&schema_text)
        .with_context(|| format!("invalid schema {}", args.schema.display()))?;
    let template_text = std::fs::read_to_string(&args.template)
        .with_context(|| format!("cannot read template {}", args.template.display()))?;
    let template = ExtractionTemplate::from_json(&template_text)
        .with_context(|| format!("invalid template {}", args.template.display()))?;

    let files = super::collect_html_inputs(&args.inputs)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create output directory {}", args.out_dir.display()))?;
    let outputs = super::plan_outputs(&files, &args.out_dir, "json")?;

    let mut failures = 0usize;
    for (file, out) in files.iter().zip(&outputs) {
        let result = (|| -> Result<()> {
            let bytes = std::fs::read(file).context("cannot read input")?;
            let tree = parse_html(&bytes, None);
            let value = extract_json(&tree, &schema, &template)?;
            let mut text = serde_json::to_string_pretty(&value).context("serialize")?;
            text.push('\n');
            std::fs::write(out, text).with_context(|| format!("cannot write {}", out.display()))?;
            Ok(())
        })();
        match result {
            Ok(()) => log::info!("{} -> {}", file.display(), out.display()),
            Err(e) => {
                failures += 1;
                log::error!("{}: {e:#}", file.display());
            }
        }
    }
    if failures > 0 {
        log::warn!("failed to extract from {failures} of {} inputs", files.len());
        return Ok(2);
    }
    Ok(0)
}
