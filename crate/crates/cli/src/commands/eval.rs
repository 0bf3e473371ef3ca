//! `htmlsift eval` — score predictions against references and print the
//! aggregate metrics table.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use htmlsift_core::jsonl::read_jsonl;
use htmlsift_core::metrics::{json_metrics, markdown_metrics, report, DocMetrics, ReportRow};
use htmlsift_core::pipeline::Task;
use htmlsift_core::JsonSchemaSpec;
use serde::{Deserialize, Serialize};

use crate::config::Config;

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predictions JSONL: one {"doc_id", "output"} object per line, with
    /// each output the model's raw text.
    #[arg(long, required = true, value_name = "FILE")]
    pub predictions: PathBuf,

    /// References JSONL: one {"doc_id", "output"} object per line; output is
    /// the reference Markdown string, or the ground-truth JSON value for the
    /// json task.
    #[arg(long, required = true, value_name = "FILE")]
    pub references: PathBuf,

    /// JSON schema for conformance checking (required for the json task).
    #[arg(long, value_name = "FILE")]
    pub schema: Option<PathBuf>,

    /// Model name shown in the report.
    #[arg(long, default_value = "model", value_name = "NAME")]
    pub model: String,

    /// Print the report as JSON instead of a text table.
    #[arg(long)]
    pub json: bool,

    /// Also write one metrics record per document to this JSONL file.
    #[arg(long, value_name = "FILE")]
    pub per_doc: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
struct PredRow {
    doc_id: String,
    output: String,
}

#[derive(Debug, Deserialize)]
struct RefRow {
    doc_id: String,
    output: serde_json::Value,
}

#[derive(Debug, Serialize)]
struct PerDocRow<'a> {
    doc_id: &'a str,
    #[serde(flatten)]
    metrics: &'a DocMetrics,
}

fn index_rows<T>(rows: Vec<T>, id_of: impl Fn(&T) -> &str, what: &str) -> Result<BTreeMap<String, T>> {
    let mut map = BTreeMap::new();
    for row in rows {
        let id = id_of(&row).to_string();
        if map.insert(id.clone(), row).is_some() {
            bail!("duplicate doc_id {id:?} in {what}");
        }
    }
    Ok(map)
}

pub fn run(args: &EvalArgs, cfg: &Config) -> Result<i32> {
    let task = cfg.task()?;
    let preds: Vec<PredRow> = read_jsonl(&args.predictions)
        .with_context(|| format!("cannot read predictions {}", args.predictions.display()))?;
    let refs: Vec<RefRow> = read_jsonl(&args.references)
        .with_context(|| format!("cannot read references {}", args.references.display()))?;
    let preds = index_rows(preds, |r| &r.doc_id, "predictions")?;
    let refs = index_rows(refs, |r| &r.doc_id, "references")?;

    let orphan_preds: Vec<&String> = preds.keys().filter(|id| !refs.contains_key(*id)).collect();
    let orphan_refs: Vec<&String> = refs.keys().filter(|id| !preds.contains_key(*id)).collect();
    if !orphan_preds.is_empty() || !orphan_refs.is_empty() {
        for id in &orphan_preds {
            eprintln!("orphan prediction doc_id: {id}");
        }
        for id in &orphan_refs {
            eprintln!("orphan reference doc_id: {id}");
        }
        eprintln!(
            "error: predictions and references do not cover the same documents \
             ({} prediction orphans, {} reference orphans)",
            orphan_preds.len(),
            orphan_refs.len()
        );
        return Ok(1);
    }
    if preds.is_empty() {
        bail!("no documents to evaluate");
    }

    let schema = match (task, &args.schema) {
        (Task::Json, Some(path)) => Some(load_schema(path)?),
        (Task::Json, None) => bail!("--schema is required for the json task"),
        (Task::Markdown, _) => None,
    };

    let mut rows = Vec::with_capacity(preds.len());
    let mut per_doc: Vec<(String, DocMetrics)> = Vec::new();
    for (doc_id, pred) in &preds {
        let reference = &refs[doc_id];
        let metrics = match task {
            Task::Markdown => {
                let text = reference.output.as_str().with_context(|| {
                    format!("reference output for {doc_id:?} must be a string for the markdown task")
                })?;
                DocMetrics::Markdown(markdown_metrics(&pred.output, text))
            }
            Task::Json => DocMetrics::Json(json_metrics(
                &pred.output,
                &reference.output,
                schema.as_ref().expect("checked above"),
            )),
        };
        per_doc.push((doc_id.clone(), metrics.clone()));
        rows.push(ReportRow {
            model: args.model.clone(),
            task: task.to_string(),
            metrics,
        });
    }

    if let Some(path) = &args.per_doc {
        write_per_doc(path, &per_doc)?;
    }

    let summary = report(&rows)?;
    if args.json {
        println!("{}", summary.to_json());
    } else {
        print!("{}", summary.to_text_table());
    }
    Ok(0)
}

fn load_schema(path: &Path) -> Result<JsonSchemaSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read schema {}", path.display()))?;
    JsonSchemaSpec::from_json(&text).with_context(|| format!("invalid schema {}", path.display()))
}

fn write_per_doc(path: &Path, rows: &[(String, DocMetrics)]) -> Result<()> {
    let mut text = String::new();
    for (doc_id, metrics) in rows {
        let row = PerDocRow { doc_id, metrics };
        text.push_str(&serde_json::to_string(&row).context("serialize per-doc row")?);
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
