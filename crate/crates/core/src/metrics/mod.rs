//! Evaluation metrics for Markdown conversion and JSON extraction.
//!
//! Markdown quality: [`rouge_l`] (token-LCS F1), [`levenshtein_norm`]
//! (character edits over max length), [`damerau_abs`] (absolute
//! optimal-string-alignment distance), and [`jaro_winkler`] (prefix-boosted
//! similarity). JSON quality: [`json_metrics`] (leaf node-set
//! precision/recall/F1 plus schema pass flag). [`report`] aggregates
//! per-document results into per-(model, task) tables.

mod edit_distance;
mod jaro;
mod json_metrics;
mod report;
mod rouge;

pub use edit_distance::{damerau_abs, levenshtein_abs, levenshtein_norm};
pub use jaro::{jaro, jaro_winkler};
pub use json_metrics::{json_metrics, JsonMetricReport};
pub use report::{
    report, AggregateMetrics, AggregateRow, DocMetrics, Report, ReportError, ReportRow,
};
pub use rouge::rouge_l;

use serde::{Deserialize, Serialize};

/// Per-document Markdown metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Token-LCS F1 in [0,1]; higher is better.
    pub rouge_l: f64,
    /// Levenshtein distance / max length, in [0,1]; lower is better.
    pub levenshtein_norm: f64,
    /// Absolute OSA Damerau-Levenshtein distance; lower is better.
    pub damerau_abs: u64,
    /// Jaro-Winkler similarity in [0,1]; higher is better.
    pub jaro_winkler: f64,
}

/// Computes all four Markdown metrics for one candidate/reference pair.
pub fn markdown_metrics(candidate: &str, reference: &str) -> MetricReport {
    MetricReport {
        rouge_l: rouge_l(candidate, reference),
        levenshtein_norm: levenshtein_norm(candidate, reference),
        damerau_abs: damerau_abs(candidate, reference),
        jaro_winkler: jaro_winkler(candidate, reference),
    }
}
