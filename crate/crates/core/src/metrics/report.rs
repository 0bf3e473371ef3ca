//! Per-(model, task) aggregation of document metrics into report tables.

use super::json_metrics::JsonMetricReport;
use super::MetricReport;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// One document's metrics, either flavor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocMetrics {
    Markdown(MetricReport),
    Json(JsonMetricReport),
}

/// One evaluated document, tagged with its model and task group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub task: String,
    pub metrics: DocMetrics,
}

/// Aggregated means for one (model, task) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateMetrics {
    Markdown {
        rouge_l: f64,
        levenshtein_norm: f64,
        /// Mean of absolute distances, so fractional.
        damerau_abs: f64,
        jaro_winkler: f64,
    },
    Json {
        f1: f64,
        precision: f64,
        recall: f64,
        /// Fraction of documents with pass=true.
        pass_rate: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub model: String,
    pub task: String,
    pub documents: usize,
    pub metrics: AggregateMetrics,
}

/// The full report: one aggregate row per (model, task), sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<AggregateRow>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no rows to aggregate")]
    EmptyInput,
    #[error("group ({model}, {task}) mixes Markdown and JSON metrics")]
    MixedKinds { model: String, task: String },
}

/// Aggregates per-document rows into per-(model, task) arithmetic means;
/// pass flags aggregate to a pass-rate fraction.
pub fn report(rows: &[ReportRow]) -> Result<Report, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let mut groups: BTreeMap<(String, String), Vec<&DocMetrics>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.model.clone(), row.task.clone()))
            .or_default()
            .push(&row.metrics);
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((model, task), docs) in groups {
        let n = docs.len() as f64;
        let uniform_markdown = docs.iter().all(|m| matches!(m, DocMetrics::Markdown(_)));
        let uniform_json = docs.iter().all(|m| matches!(m, DocMetrics::Json(_)));
        let metrics = if uniform_markdown {
            let mut rouge = 0.0;
            let mut lev = 0.0;
            let mut dam = 0.0;
            let mut jw = 0.0;
            for m in &docs {
                let DocMetrics::Markdown(r) = m else { unreachable!() };
                rouge += r.rouge_l;
                lev += r.levenshtein_norm;
                dam += r.damerau_abs as f64;
                jw += r.jaro_winkler;
            }
            AggregateMetrics::Markdown {
                rouge_l: rouge / n,
                levenshtein_norm: lev / n,
                damerau_abs: dam / n,
                jaro_winkler: jw / n,
            }
        } else if uniform_json {
            let mut f1 = 0.0;
            let mut precision = 0.0;
            let mut recall = 0.0;
            let mut passes = 0.0;
            for m in &docs {
                let DocMetrics::Json(r) = m else { unreachable!() };
                f1 += r.f1;
                precision += r.precision;
                recall += r.recall;
                passes += f64::from(r.pass);
            }
            AggregateMetrics::Json {
                f1: f1 / n,
                precision: precision / n,
                recall: recall / n,
                pass_rate: passes / n,
            }
        } else {
            return Err(ReportError::MixedKinds { model, task });
        };
        out.push(AggregateRow {
            model,
            task,
            documents: docs.len(),
            metrics,
        });
    }
    Ok(Report { rows: out })
}

impl Report {
    /// Machine-readable JSON (pretty-printed).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned fixed-width text tables: one table per metric kind, with the
    /// canonical column sets "Rouge-L, Levenshtein, Damerau, Jaro-Winkler"
    /// (Markdown) and "F1, Precision, Recall, Pass-Rate" (JSON).
    pub fn to_text_table(&self) -> String {
        let markdown_rows: Vec<&AggregateRow> = self
            .rows
            .iter()
            .filter(|r| matches!(r.metrics, AggregateMetrics::Markdown { .. }))
            .collect();
        let json_rows: Vec<&AggregateRow> = self
            .rows
            .iter()
            .filter(|r| matches!(r.metrics, AggregateMetrics::Json { .. }))
            .collect();
        let mut out = String::new();
        if !markdown_rows.is_empty() {
            let header = ["Model", "Task", "Docs", "Rouge-L", "Levenshtein", "Damerau", "Jaro-Winkler"];
            let body: Vec<[String; 7]> = markdown_rows
                .iter()
                .map(|r| {
                    let AggregateMetrics::Markdown {
                        rouge_l,
                        levenshtein_norm,
                        damerau_abs,
                        jaro_winkler,
                    } = &r.metrics
                    else {
                        unreachable!()
                    };
                    [
                        r.model.clone(),
                        r.task.clone(),
                        r.documents.to_string(),
                        format!("{rouge_l:.4}"),
                        format!("{levenshtein_norm:.4}"),
                        format!("{damerau_abs:.2}"),
                        format!("{jaro_winkler:.4}"),
                    ]
                })
                .collect();
            write_table(&mut out, &header, &body);
        }
        if !json_rows.is_empty() {
            if !out.is_empty() {
                out.push('\n');
            }
            let header = ["Model", "Task", "Docs", "F1", "Precision", "Recall", "Pass-Rate"];
            let body: Vec<[String; 7]> = json_rows
                .iter()
                .map(|r| {
                    let AggregateMetrics::Json {
                        f1,
                        precision,
                        recall,
                        pass_rate,
                    } = &r.metrics
                    else {
                        unreachable!()
                    };
                    [
                        r.model.clone(),
                        r.task.clone(),
                        r.documents.to_string(),
                        format!("{f1:.4}"),
                        format!("{precision:.4}"),
                        format!("{recall:.4}"),
                        format!("{pass_rate:.4}"),
                    ]
                })
                .collect();
            write_table(&mut out, &header, &body);
        }
        out
    }
}

fn write_table(out: &mut String, header: &[&str; 7], body: &[[String; 7]]) {
    let mut widths: [usize; 7] = header.map(str::len);
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let write_row = |out: &mut String, cells: &[String; 7]| {
        for (i, (cell, w)) in cells.iter().zip(widths.iter()).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let _ = write!(out, "{cell:<w$}", w = w);
        }
        // Trim the padding on the last column.
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    };
    write_row(out, &header.map(str::to_string));
    let dashes: [String; 7] = widths.map(|w| "-".repeat(w));
    write_row(out, &dashes);
    for row in body {
        write_row(out, row);
    }
}
